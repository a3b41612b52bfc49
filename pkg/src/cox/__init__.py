"""Driver marks and the Cox configuration they induce."""

from .driver import (
    BlockMarks,
    Driver,
    ResampleScope,
    sample_block_marks,
    sample_driver,
    with_inserted_mark,
    resample,
)
from .realize import (
    BlockPoints,
    CoxConfiguration,
    realize,
    realize_block,
    realize_blocks,
    assemble,
    width_proposals,
    write_configuration,
)

__all__ = [
    'BlockMarks',
    'Driver',
    'ResampleScope',
    'sample_block_marks',
    'sample_driver',
    'with_inserted_mark',
    'resample',
    'BlockPoints',
    'CoxConfiguration',
    'realize',
    'realize_block',
    'realize_blocks',
    'assemble',
    'width_proposals',
    'write_configuration',
]
