"""Session parsing, command dispatch and certificate verification."""
from .commands import run_command, run_session
from .session import Session, SessionError, corpus, emit_session, parse_session
from .verify import verify_artifact
