from .bank import BANK_FORMAT_VERSION, BankInverseSolver, ModelBank, load_bank, save_bank, table_provenance, train_bank
from .holdout import ErrorReport, HoldoutSummary, evaluate_holdout, split_indices, summarize_holdout
from .rbn import (
    KERNEL_NAME,
    KERNEL_SCALE,
    PermittivityEstimate,
    RbnModel,
    fit_rbn,
    kernel,
    predict,
    predict_many,
    train_rbn,
)
