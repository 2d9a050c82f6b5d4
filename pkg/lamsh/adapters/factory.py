from typing import Dict, List, Optional

from lamsh.adapters.base import ProcessAdapter
from lamsh.adapters.subprocess_adapter import SubprocessAdapter
from lamsh.core.config import settings


class AdapterFactory:
    """Factory for process adapters."""

    _adapters: Dict[str, ProcessAdapter] = {
        "subprocess": SubprocessAdapter()
    }

    @classmethod
    def get_adapter(cls, provider: Optional[str] = None) -> Optional[ProcessAdapter]:
        """Get adapter by provider name, the configured one by default."""
        return cls._adapters.get(provider or settings.PROCESS_ADAPTER)

    @classmethod
    def register_adapter(cls, provider: str, adapter: ProcessAdapter) -> None:
        """Register a new adapter."""
        cls._adapters[provider] = adapter

    @classmethod
    def get_available_providers(cls) -> List[str]:
        """Get list of available providers."""
        return list(cls._adapters.keys())
