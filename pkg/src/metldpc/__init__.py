"""Multi-edge-type LDPC codes with sum-product, min-sum and
iteration-dependent scaled min-sum decoding."""

__version__ = "0.1.0"

from .protograph import Protograph, ProtographFormatError, load_protograph, parse_protograph  # noqa: E402
from .code import MetLdpcCode, code_stats, lift_protograph, read_code, write_code  # noqa: E402
from .channel import ChannelParams, esn0_to_sigma2, transmit_all_zero  # noqa: E402
from .decoders import (  # noqa: E402
    DecodeResult,
    IdMinSumDecoder,
    MinSumDecoder,
    SumProductDecoder,
    id_msa_decode,
    msa_decode,
    spa_decode,
)
from .simulate import FerResult, SimConfig, run_fer  # noqa: E402

__all__ = [
    "Protograph", "ProtographFormatError", "load_protograph", "parse_protograph",
    "MetLdpcCode", "code_stats", "lift_protograph", "read_code", "write_code",
    "ChannelParams", "esn0_to_sigma2", "transmit_all_zero",
    "DecodeResult", "IdMinSumDecoder", "MinSumDecoder", "SumProductDecoder",
    "id_msa_decode", "msa_decode", "spa_decode",
    "FerResult", "SimConfig", "run_fer",
]
