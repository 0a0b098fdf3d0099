"""Archive key derivation shared with the offline exporter.

Any tool writing embedding archives must derive keys exactly like this module
(the repo ships a golden file of string -> key pairs checked on both sides):

  text key    = "text:" + sha1(normalize_text(s).encode("utf-8")).hexdigest()
  visual keys = "visual:<feature_ref>#<token_index>", plus the companion
                count key "visual:<feature_ref>#count"

normalize_text: Unicode NFC, collapse whitespace runs (the explicit codepoint
table below, identical across implementations) to one space, trim, then
simple lowercase. Simple lowercase rather than full casefolding, so the rule
is reproducible across language runtimes.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata

TEXT_KEY_PREFIX = "text:"
VISUAL_KEY_PREFIX = "visual:"
COUNT_SUFFIX = "#count"

# Shared whitespace contract, inclusive codepoint ranges.
WS_RANGES: tuple[tuple[int, int], ...] = (
    (0x09, 0x0D),
    (0x1C, 0x1F),
    (0x20, 0x20),
    (0x85, 0x85),
    (0xA0, 0xA0),
    (0x1680, 0x1680),
    (0x2000, 0x200A),
    (0x2028, 0x2029),
    (0x202F, 0x202F),
    (0x205F, 0x205F),
    (0x3000, 0x3000),
    (0xFEFF, 0xFEFF),
)

_WS = re.compile(
    "["
    + "".join(
        re.escape(chr(a)) if a == b else f"{re.escape(chr(a))}-{re.escape(chr(b))}"
        for a, b in WS_RANGES
    )
    + "]+"
)


def normalize_text(text: str) -> str:
    collapsed = _WS.sub(" ", unicodedata.normalize("NFC", text))
    return collapsed.strip(" ").lower()


def text_key(text: str) -> str:
    digest = hashlib.sha1(normalize_text(text).encode("utf-8")).hexdigest()
    return TEXT_KEY_PREFIX + digest


def visual_token_key(feature_ref: str, index: int) -> str:
    return f"{VISUAL_KEY_PREFIX}{feature_ref}#{index}"


def visual_count_key(feature_ref: str) -> str:
    return VISUAL_KEY_PREFIX + feature_ref + COUNT_SUFFIX
