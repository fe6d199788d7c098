from .processor import PipelineState, check_done, decode_step, execute_step

__all__ = ["PipelineState", "check_done", "decode_step", "execute_step"]
