"""Reader for prior-knowledge JSON files."""

import json
from pathlib import Path

from pydantic import ValidationError

from ..models.schemas import SCHEMA_VERSION, KnowledgeSet
from ..utils.errors import ParseError
from ..utils.logger import get_logger

logger = get_logger({"module": "knowledge_io"})


def read_knowledge(path: str) -> KnowledgeSet:
    """
    Read a KnowledgeSet written by ``sample-knowledge``.

    Raises:
        ParseError: If the file is missing, not JSON, of another schema version
            or does not describe a knowledge set
    """
    file_path = Path(path)
    if not file_path.exists():
        raise ParseError("file not found", path=str(path))

    try:
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", path=str(path), line=e.lineno)

    if not isinstance(data, dict):
        raise ParseError("knowledge file must hold a JSON object", path=str(path))
    version = data.pop("schema_version", SCHEMA_VERSION)
    if str(version).split(".")[0] != SCHEMA_VERSION.split(".")[0]:
        raise ParseError(f"unsupported schema_version {version}", path=str(path))

    try:
        knowledge = KnowledgeSet.model_validate(data)
    except (ValidationError, TypeError, IndexError) as e:
        raise ParseError(f"invalid knowledge set: {e}", path=str(path))

    logger.info(
        "knowledge_read",
        path=str(path),
        known_edges=len(knowledge.known_edges),
        known_non_edges=len(knowledge.known_non_edges),
    )
    return knowledge
