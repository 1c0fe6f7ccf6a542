from dataclasses import dataclass

DEFAULT_MAX_INPUT_TOKENS = 1024


@dataclass(frozen=True)
class ServerConfig:
    """Everything the server and the fine-tuning sweep need to know.

    `model` is either "stub", the path of a checkpoint file written by
    finetune, or the name of a pre-trained encoder-decoder model.
    `max_input_tokens` is the model-side input limit; longer inputs are
    truncated and flagged in the response.
    """

    model: str = "stub"
    max_input_tokens: int = DEFAULT_MAX_INPUT_TOKENS
    beam_size: int = 1
    max_output_tokens: int = 256
    host: str = "127.0.0.1"
    port: int = 8008
    seed: int = 0

    def __post_init__(self):
        if self.max_input_tokens < 1:
            raise ValueError("max_input_tokens must be >= 1")
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")
