from .handlers import LogResultHandler, NoOpResultHandler, ResultHandler, SaveToFileResultHandler
