import logging
import os


def get_setting_env_first(env_key: str, default: str | None = None) -> str | None:
    """
    Retrieve a setting by first checking environment variables.

    Values from a `.env` file are visible here once `load_dotenv()` has run.

    Args:
        env_key (str): The name of the environment variable.
        default (str, optional): Value returned when the variable is unset or empty.

    Returns:
        str | None: The environment value, or the default.
    """
    logger = logging.getLogger("fallback")
    value = os.getenv(env_key)
    if value:
        logger.debug(f"Loaded setting '{env_key}' from .env or system environment.")
        return value

    logger.debug(f"Setting '{env_key}' not found, using default {default!r}.")
    return default


def get_int_setting(env_key: str, default: int, minimum: int = 1) -> int:
    """
    Read an integer setting, falling back to the default on bad input.

    Args:
        env_key (str): The name of the environment variable.
        default (int): Value used when unset or unparsable.
        minimum (int, optional): Lower clamp. Defaults to 1.

    Returns:
        int: The clamped setting.
    """
    raw = get_setting_env_first(env_key)
    if raw is None:
        return default
    try:
        return max(minimum, int(raw))
    except ValueError:
        logging.getLogger("fallback").warning(
            f"Ignoring non-integer {env_key}={raw!r}; using {default}."
        )
        return default
