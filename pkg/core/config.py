from dotenv import load_dotenv
load_dotenv()

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field
from typing import Optional


class Settings(BaseSettings):
    # Logging
    log_level: str = Field(
        default="INFO",
        description="Log verbosity (DEBUG, INFO, WARNING, ERROR)"
    )
    log_dir: str = Field(
        default="./logs",
        description="Directory holding the rotating log file"
    )
    log_to_file: bool = Field(
        default=True,
        description="Attach the rotating file handler in addition to the console handler"
    )
    log_max_bytes: int = Field(
        default=1024 * 1024,
        description="Maximum size of the log file before rotation"
    )
    log_backup_count: int = Field(
        default=5,
        description="Number of rotated log files to keep"
    )

    # Training defaults
    learning_rate: float = Field(
        default=1e-3,
        description="Adam learning rate"
    )
    weight_decay: float = Field(
        default=1e-5,
        description="L2 penalty added to the gradient before the Adam update"
    )
    epochs: int = Field(
        default=1000,
        description="Maximum number of training epochs"
    )
    dropout_p: float = Field(
        default=0.2,
        description="Dropout probability around the node-linear layer"
    )
    seed: int = Field(
        default=0,
        description="Seed for parameter initialization, shuffling and dropout masks"
    )
    plateau_check_interval: int = Field(
        default=100,
        description="Number of epochs between two loss-plateau checks"
    )
    plateau_relative_tolerance: Optional[float] = Field(
        default=1e-3,
        description="Minimum relative improvement of the windowed loss; unset disables the check"
    )

    # Data handling
    preprocess_workers: int = Field(
        default=1,
        description="Threads used to turn meshes into surface graphs"
    )
    manifest_name: str = Field(
        default="manifest.tsv",
        description="File name of the dataset manifest written by gen-synth"
    )

    model_config = SettingsConfigDict(
        env_prefix="FORGEWEAR_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

settings = Settings()
