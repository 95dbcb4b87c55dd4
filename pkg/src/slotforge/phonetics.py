"""Phonetic keys for typo-tolerant person-name matching.

Double Metaphone (Lawrence Philips' second-generation Metaphone) encodes a
word by how it sounds, so "Spielberg", "Spilberg" and "Spillberg" all map to
the same code. Codes here are emitted in full, without the traditional
4-character cap, so long surnames keep distinct keys.
"""

from __future__ import annotations

VOWELS = frozenset("AEIOUY")
SILENT_STARTERS = ("GN", "KN", "PN", "WR", "PS")

# Pad so lookbehind/lookahead slicing never walks off the word.
_LEAD = 2
_TAIL = 5


def double_metaphone(word: str) -> tuple[str, str]:
    """Return the (primary, secondary) Double Metaphone codes of one word.

    The secondary code equals the primary when no alternate pronunciation
    exists. Characters outside A-Z contribute nothing. Empty or non-alphabetic
    input yields empty codes.
    """
    raw = word.upper()
    length = len(raw)
    if length == 0:
        return "", ""

    germanic = (
        "W" in raw or "K" in raw or "CZ" in raw or "WITZ" in raw
    )
    s = "-" * _LEAD + raw + " " * _TAIL
    first = _LEAD
    last = first + length - 1
    pos = first
    pri: list[str] = []
    sec: list[str] = []

    def emit(p: str | None, a: str | None = None) -> None:
        # a=None means the alternate matches the primary
        if p:
            pri.append(p)
        alt = p if a is None else a
        if alt:
            sec.append(alt)

    if s[first : first + 2] in SILENT_STARTERS:
        pos += 1
    if s[first] == "X":
        emit("S")  # initial X sounds like Z, coded S
        pos += 1

    while pos <= last:
        ch = s[pos]
        step = 1

        if ch in VOWELS:
            if pos == first:
                emit("A")  # initial vowels all code to A

        elif ch == "B":
            emit("P")
            step = 2 if s[pos + 1] == "B" else 1

        elif ch == "C":
            if (
                pos > first + 1
                and s[pos - 2] not in VOWELS
                and s[pos - 1 : pos + 2] == "ACH"
                and (s[pos + 2] not in ("I", "E") or s[pos - 2 : pos + 4] in ("BACHER", "MACHER"))
            ):
                emit("K")
                step = 2
            elif pos == first and s[first : first + 6] == "CAESAR":
                emit("S")
                step = 2
            elif s[pos : pos + 4] == "CHIA":
                emit("K")
                step = 2
            elif s[pos : pos + 2] == "CH":
                if pos > first and s[pos : pos + 4] == "CHAE":
                    emit("K", "X")
                    step = 2
                elif (
                    pos == first
                    and (
                        s[pos + 1 : pos + 6] in ("HARAC", "HARIS")
                        or s[pos + 1 : pos + 4] in ("HOR", "HYM", "HIA", "HEM")
                    )
                    and s[first : first + 5] != "CHORE"
                ):
                    emit("K")
                    step = 2
                elif (
                    s[first : first + 4] in ("VAN ", "VON ")
                    or s[first : first + 3] == "SCH"
                    or s[pos - 2 : pos + 4] in ("ORCHES", "ARCHIT", "ORCHID")
                    or s[pos + 2] in ("T", "S")
                    or (
                        (s[pos - 1] in ("A", "O", "U", "E") or pos == first)
                        and s[pos + 2] in ("L", "R", "N", "M", "B", "H", "F", "V", "W", " ")
                    )
                ):
                    emit("K")
                else:
                    if pos > first:
                        if s[first : first + 2] == "MC":
                            emit("K")
                        else:
                            emit("X", "K")
                    else:
                        emit("X")
                    step = 2
            elif s[pos : pos + 2] == "CZ" and s[pos - 2 : pos + 2] != "WICZ":
                emit("S", "X")
                step = 2
            elif s[pos + 1 : pos + 4] == "CIA":
                emit("X")
                step = 3
            elif s[pos : pos + 2] == "CC" and not (pos == first + 1 and s[first] == "M"):
                if s[pos + 2] in ("I", "E", "H") and s[pos + 2 : pos + 4] != "HU":
                    if (pos == first + 1 and s[first] == "A") or s[pos - 1 : pos + 4] in ("UCCEE", "UCCES"):
                        emit("KS")
                    else:
                        emit("X")
                    step = 3
                else:
                    emit("K")
                    step = 2
            elif s[pos : pos + 2] in ("CK", "CG", "CQ"):
                emit("K")
                step = 2
            elif s[pos : pos + 2] in ("CI", "CE", "CY"):
                if s[pos : pos + 3] in ("CIO", "CIE", "CIA"):
                    emit("S", "X")
                else:
                    emit("S")
                step = 2
            else:
                if s[pos + 1 : pos + 3] in (" C", " Q", " G"):
                    emit("K")
                    step = 3
                elif s[pos + 1] in ("C", "K", "Q") and s[pos + 1 : pos + 3] not in ("CE", "CI"):
                    emit("K")
                    step = 2
                else:
                    emit("K")

        elif ch == "D":
            if s[pos : pos + 2] == "DG":
                if s[pos + 2] in ("I", "E", "Y"):
                    emit("J")  # e.g. "edge"
                    step = 3
                else:
                    emit("TK")
                    step = 2
            elif s[pos : pos + 2] in ("DT", "DD"):
                emit("T")
                step = 2
            else:
                emit("T")

        elif ch == "F":
            emit("F")
            step = 2 if s[pos + 1] == "F" else 1

        elif ch == "G":
            if s[pos + 1] == "H":
                if pos > first and s[pos - 1] not in VOWELS:
                    emit("K")
                    step = 2
                elif pos < first + 3:
                    if pos == first:
                        if s[pos + 2] == "I":
                            emit("J")  # "ghislane"
                        else:
                            emit("K")
                        step = 2
                    else:
                        step = 1
                elif (
                    (pos > first + 1 and s[pos - 2] in ("B", "H", "D"))
                    or (pos > first + 2 and s[pos - 3] in ("B", "H", "D"))
                    or (pos > first + 3 and s[pos - 4] in ("B", "H"))
                ):
                    step = 2  # silent as in "hugh"
                else:
                    if pos > first + 2 and s[pos - 1] == "U" and s[pos - 3] in ("C", "G", "L", "R", "T"):
                        emit("F")  # "laugh", "rough"
                        step = 2
                    elif pos > first and s[pos - 1] != "I":
                        emit("K")
                        step = 2
                    else:
                        step = 1
            elif s[pos + 1] == "N":
                if pos == first + 1 and s[first] in VOWELS and not germanic:
                    emit("KN", "N")
                elif s[pos + 2 : pos + 4] != "EY" and s[pos + 1] != "Y" and not germanic:
                    emit("N", "KN")
                else:
                    emit("KN")
                step = 2
            elif s[pos + 1 : pos + 3] == "LI" and not germanic:
                emit("KL", "L")
                step = 2
            elif pos == first and (
                s[pos + 1] == "Y"
                or s[pos + 1 : pos + 3] in ("ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER")
            ):
                emit("K", "J")
                step = 2
            elif (
                (s[pos + 1 : pos + 2] == "ER" or s[pos + 1] == "Y")
                and s[first : first + 6] not in ("DANGER", "RANGER", "MANGER")
                and s[pos - 1] not in ("E", "I")
                and s[pos - 1 : pos + 2] not in ("RGY", "OGY")
            ):
                emit("K", "J")
                step = 2
            elif s[pos + 1] in ("E", "I", "Y") or s[pos - 1 : pos + 3] in ("AGGI", "OGGI"):
                if s[first : first + 4] in ("VON ", "VAN ") or s[first : first + 3] == "SCH" or s[pos + 1 : pos + 3] == "ET":
                    emit("K")
                elif s[pos + 1 : pos + 5] == "IER ":
                    emit("J")
                else:
                    emit("J", "K")
                step = 2
            elif s[pos + 1] == "G":
                emit("K")
                step = 2
            else:
                emit("K")

        elif ch == "H":
            if (pos == first or s[pos - 1] in VOWELS) and s[pos + 1] in VOWELS:
                emit("H")
                step = 2
            else:
                step = 1  # silent

        elif ch == "J":
            if s[pos : pos + 4] == "JOSE" or s[first : first + 4] == "SAN ":
                if (pos == first and s[pos + 4] == " ") or s[first : first + 4] == "SAN ":
                    emit("H")
                else:
                    emit("J", "H")
            elif pos == first and s[pos : pos + 4] != "JOSE":
                emit("J", "A")
            elif s[pos - 1] in VOWELS and not germanic and s[pos + 1] in ("A", "O"):
                emit("J", "H")
            elif pos == last:
                emit("J", " ")
            elif s[pos + 1] not in ("L", "T", "K", "S", "N", "M", "B", "Z") and s[pos - 1] not in ("S", "K", "L"):
                emit("J")
            step = 2 if s[pos + 1] == "J" else 1

        elif ch == "K":
            emit("K")
            step = 2 if s[pos + 1] == "K" else 1

        elif ch == "L":
            if s[pos + 1] == "L":
                if (pos == last - 2 and s[pos - 1 : pos + 3] in ("ILLO", "ILLA", "ALLE")) or (
                    (s[last - 1 : last + 1] in ("AS", "OS") or s[last] in ("A", "O"))
                    and s[pos - 1 : pos + 3] == "ALLE"
                ):
                    emit("L", "")  # spanish "cabrillo"
                else:
                    emit("L")
                step = 2
            else:
                emit("L")

        elif ch == "M":
            emit("M")
            if (s[pos + 1 : pos + 4] == "UMB" and (pos + 1 == last or s[pos + 2 : pos + 4] == "ER")) or s[pos + 1] == "M":
                step = 2

        elif ch == "N":
            emit("N")
            step = 2 if s[pos + 1] == "N" else 1

        elif ch == "P":
            if s[pos + 1] == "H":
                emit("F")
                step = 2
            else:
                emit("P")
                step = 2 if s[pos + 1] in ("P", "B") else 1

        elif ch == "Q":
            emit("K")
            step = 2 if s[pos + 1] == "Q" else 1

        elif ch == "R":
            if pos == last and not germanic and s[pos - 2 : pos] == "IE" and s[pos - 4 : pos - 2] not in ("ME", "MA"):
                emit("", "R")  # french "rogier"
            else:
                emit("R")
            step = 2 if s[pos + 1] == "R" else 1

        elif ch == "S":
            if s[pos - 1 : pos + 2] in ("ISL", "YSL"):
                step = 1  # silent, "island"
            elif pos == first and s[first : first + 5] == "SUGAR":
                emit("X", "S")
            elif s[pos : pos + 2] == "SH":
                if s[pos + 1 : pos + 5] in ("HEIM", "HOEK", "HOLM", "HOLZ"):
                    emit("S")
                else:
                    emit("X")
                step = 2
            elif s[pos : pos + 3] in ("SIO", "SIA") or s[pos : pos + 4] == "SIAN":
                if not germanic:
                    emit("S", "X")
                else:
                    emit("S")
                step = 3
            elif (pos == first and s[pos + 1] in ("M", "N", "L", "W")) or s[pos + 1] == "Z":
                emit("S", "X")
                step = 2 if s[pos + 1] == "Z" else 1
            elif s[pos : pos + 2] == "SC":
                if s[pos + 2] == "H":
                    if s[pos + 3 : pos + 5] in ("OO", "ER", "EN", "UY", "ED", "EM"):
                        if s[pos + 3 : pos + 5] in ("ER", "EN"):
                            emit("X", "SK")
                        else:
                            emit("SK")
                    elif pos == first and s[first + 3] not in VOWELS and s[first + 3] != "W":
                        emit("X", "S")
                    else:
                        emit("X")
                elif s[pos + 2] in ("I", "E", "Y"):
                    emit("S")
                else:
                    emit("SK")
                step = 3
            elif pos == last and s[pos - 2 : pos] in ("AI", "OI"):
                emit("", "S")  # french "resnais"
            else:
                emit("S")
                step = 2 if s[pos + 1] in ("S", "Z") else 1

        elif ch == "T":
            if s[pos : pos + 4] == "TION":
                emit("X")
                step = 3
            elif s[pos : pos + 3] in ("TIA", "TCH"):
                emit("X")
                step = 3
            elif s[pos : pos + 2] == "TH" or s[pos : pos + 3] == "TTH":
                if s[pos + 2 : pos + 4] in ("OM", "AM") or s[first : first + 4] in ("VON ", "VAN ") or s[first : first + 3] == "SCH":
                    emit("T")
                else:
                    emit("0", "T")
                step = 2
            else:
                emit("T")
                step = 2 if s[pos + 1] in ("T", "D") else 1

        elif ch == "V":
            emit("F")
            step = 2 if s[pos + 1] == "V" else 1

        elif ch == "W":
            if s[pos : pos + 2] == "WR":
                emit("R")
                step = 2
            elif pos == first and (s[pos + 1] in VOWELS or s[pos : pos + 2] == "WH"):
                if s[pos + 1] in VOWELS:
                    emit("A", "F")  # Wasserman ~ Vasserman
                else:
                    emit("A")
            elif (
                (pos == last and s[pos - 1] in VOWELS)
                or s[pos - 1 : pos + 5] in ("EWSKI", "EWSKY", "OWSKI", "OWSKY")
                or s[first : first + 3] == "SCH"
            ):
                emit("", "F")
            elif s[pos : pos + 4] in ("WICZ", "WITZ"):
                emit("TS", "FX")
                step = 4
            # else silent

        elif ch == "X":
            if not (pos == last and (s[pos - 3 : pos] in ("IAU", "EAU") or s[pos - 2 : pos] in ("AU", "OU"))):
                emit("KS")
            step = 2 if s[pos + 1] in ("C", "X") else 1

        elif ch == "Z":
            if s[pos + 1] == "H":
                emit("J")  # pinyin "zhao"
            elif s[pos + 1 : pos + 3] in ("ZO", "ZI", "ZA") or (germanic and pos > first and s[pos - 1] != "T"):
                emit("S", "TS")
            else:
                emit("S")
            step = 2 if s[pos + 1] == "Z" else 1

        pos += step

    primary = "".join(pri)
    secondary = "".join(sec)
    return primary, secondary


def metaphone_word(word: str) -> str:
    """Primary Double Metaphone code of a single word, uppercase, untruncated."""
    return double_metaphone(word.strip())[0]


def person_key(full_name: str) -> str:
    """Space-joined per-word primary codes for a full name.

    Case-insensitive and whitespace-normalizing, so "nataly  portman" and
    "Natalie Portman" produce the same key. Words that encode to nothing
    (digits, punctuation runs) are dropped.
    """
    codes = (metaphone_word(w) for w in full_name.split())
    return " ".join(c for c in codes if c)
