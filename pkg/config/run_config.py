# config/run_config.py
from dataclasses import dataclass, field, asdict

from config.settings import (
    DEFAULT_KAPPA,
    DEFAULT_ALPHA,
    DEFAULT_BINS,
    DEFAULT_HISTORY_LENGTH,
    DEFAULT_PREFIX_MODE,
    DEFAULT_CLUSTER_CLASSES,
    DEFAULT_SEED,
    DEFAULT_THREADS,
    DEFAULT_TOP_N,
)
from src.utils.errors import UsageError

TRANSFORMS = ("bag", "bin", "expand", "cluster")


@dataclass
class RunConfig:
    """Settings of one command-line run.

    Flags the user did not give stay None until `resolve()` fills them from
    config.settings, so that `validate()` can tell an explicit `--bins` apart
    from the default.
    """

    command: str = "train"
    transform: str = "bag"
    bins: int = None
    prefix_mode: bool = DEFAULT_PREFIX_MODE
    history_length: int = None
    kappa: float = None
    cluster_classes: int = None
    alpha: float = None
    seed: int = None
    threads: int = None
    train_path: str = None
    test_path: str = None
    model_path: str = None
    report_path: str = None
    top_n: int = None
    exclude_seen: bool = False
    per_position: bool = False
    list_mode: bool = False
    tune_kappa: bool = False
    prefix: list = field(default_factory=list)
    defaulted: list = field(default_factory=list)

    def validate(self):
        """Raise UsageError for inconsistent flag combinations."""
        if self.transform not in TRANSFORMS:
            raise UsageError(f"Unknown transform {self.transform!r}; choose one of {', '.join(TRANSFORMS)}")
        if self.command == "train":
            if self.bins is not None and self.transform != "bin":
                raise UsageError("--bins only applies to --transform bin")
            if self.history_length is not None and self.transform != "expand":
                raise UsageError("--history-len only applies to --transform expand")
            if self.cluster_classes is not None and self.transform != "cluster":
                raise UsageError("--classes only applies to --transform cluster")
            if not self.prefix_mode and self.transform != "bin":
                raise UsageError("--no-prefix only applies to --transform bin")
            if self.tune_kappa and self.transform == "cluster":
                raise UsageError("--tune-kappa applies to the decision-tree families only")

        for name in ("bins", "history_length", "cluster_classes", "threads", "top_n"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be at least 1, got {value}")
        if self.kappa is not None and not 0.0 < self.kappa <= 1.0:
            raise UsageError(f"--kappa must lie in (0, 1], got {self.kappa}")
        if self.alpha is not None and self.alpha <= 0:
            raise UsageError(f"--alpha must be positive, got {self.alpha}")
        return self

    def check_paths(self):
        """Raise UsageError when the command is missing a file argument."""
        required = {
            "train": ("train_path", "model_path"),
            "evaluate": ("model_path", "test_path"),
            "recommend": ("model_path",),
            "stats": ("train_path",),
            "experiment": ("train_path", "test_path"),
        }.get(self.command, ())
        for name in required:
            if getattr(self, name) is None:
                flag = "--" + name.replace("_path", "")
                raise UsageError(f"`{self.command}` needs {flag} PATH")
        return self

    def resolve(self):
        """Fill unset values from config.settings (after validate).

        Names of the filled fields are kept in `defaulted`.
        """
        defaults = {
            "bins": DEFAULT_BINS,
            "history_length": DEFAULT_HISTORY_LENGTH,
            "kappa": DEFAULT_KAPPA,
            "cluster_classes": DEFAULT_CLUSTER_CLASSES,
            "alpha": DEFAULT_ALPHA,
            "seed": DEFAULT_SEED,
            "threads": DEFAULT_THREADS,
            "top_n": DEFAULT_TOP_N,
        }
        for name, value in defaults.items():
            if getattr(self, name) is None:
                setattr(self, name, value)
                self.defaulted.append(name)
        return self

    def training_snapshot(self):
        """Settings that shape a trained model, for the model document."""
        snapshot = {"transform": self.transform, "kappa": self.kappa, "seed": self.seed}
        if self.transform == "bin":
            snapshot.update(bins=self.bins, prefix_mode=self.prefix_mode)
        elif self.transform == "expand":
            snapshot.update(history_length=self.history_length)
        elif self.transform == "cluster":
            snapshot.update(classes=self.cluster_classes)
            snapshot.pop("kappa")
        return snapshot

    def to_dict(self):
        return asdict(self)
