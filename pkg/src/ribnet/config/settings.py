from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    DATA_ROOT: str = "./data"
    OUTPUT_ROOT: str = "./outputs"
    RIBNET_THREADS: int = 0  # 0 = one worker per CPU
    RIBNET_SEED: int = 0
    RIBNET_PROGRESS: bool = False
    RIBNET_QUIET: bool = False

    model_config = SettingsConfigDict(
        env_file=".env",
        extra="ignore",
    )


settings = Settings()
