from .documents import (
    AuditReport,
    AuditRequest,
    DeepPointRunRecord,
    DomainElementRecord,
    FeasibilityInstance,
    HalfspaceModel,
    IterationRecordDoc,
    LabeledInstance,
    LedgerEntry,
    PrivacyRecord,
    dump_decreasing_list,
)

__all__ = [
    "AuditReport", "AuditRequest", "DeepPointRunRecord", "DomainElementRecord", "FeasibilityInstance",
    "HalfspaceModel", "IterationRecordDoc", "LabeledInstance", "LedgerEntry", "PrivacyRecord",
    "dump_decreasing_list",
]
