"""Error taxonomy for the bridge, mirrored by the CLI exit codes."""


class BridgeError(Exception):
    """Base class for everything this package raises on purpose."""


class ConfigError(BridgeError):
    """Bad configuration: unknown encoder or template, invalid flag values."""


class DataError(BridgeError):
    """Bad input data: unreadable corpus, malformed CSV."""


class ContractError(BridgeError):
    """Prompt renderings drifted from the shared golden file."""
