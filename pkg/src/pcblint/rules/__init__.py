from .config import (
    CheckParams,
    ConfigError,
    LabConfig,
    RuleSetConfig,
    build_config,
    default_config,
    default_config_text,
    load_config,
)
from .engine import (
    INTERNAL_RULE,
    Design,
    DocKind,
    Finding,
    MissingDocument,
    Phase,
    Registry,
    Rule,
    RuleContext,
    RuleError,
    Severity,
    UnknownLab,
    run_rules,
)
from .locator import locator
