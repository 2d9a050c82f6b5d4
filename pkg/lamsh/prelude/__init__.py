from .install import install_prelude
from .registry import parse_signature, register_conversion, register_host_function

__all__ = ["install_prelude", "parse_signature", "register_conversion", "register_host_function"]
