"""Minimal ELF64 reader for listing a shared object's exported functions.

Reads the dynamic symbol table directly so no external binutils are
needed.  Little-endian 64-bit ELF only (the platforms this engine
dispatches on here).
"""

from __future__ import annotations

import struct
from pathlib import Path

from .errors import LoadError

_SHT_DYNSYM = 11
_STT_FUNC = 2
_STB_GLOBAL = 1
_STB_WEAK = 2
_SHN_UNDEF = 0


def exported_functions(path) -> list[str]:
    """Defined global/weak function symbols, sorted by name."""
    raw = Path(path).read_bytes()
    if len(raw) < 64 or raw[:4] != b"\x7fELF":
        raise LoadError(f"{path}: not an ELF object")
    if raw[4] != 2 or raw[5] != 1:
        raise LoadError(f"{path}: only 64-bit little-endian ELF is supported")
    e_shoff, = struct.unpack_from("<Q", raw, 0x28)
    e_shentsize, e_shnum = struct.unpack_from("<HH", raw, 0x3A)
    if e_shoff == 0 or e_shnum == 0:
        raise LoadError(f"{path}: no section headers")

    sections = []
    for i in range(e_shnum):
        off = e_shoff + i * e_shentsize
        sh_type, = struct.unpack_from("<I", raw, off + 4)
        sh_link, = struct.unpack_from("<I", raw, off + 40)
        sh_offset, sh_size = struct.unpack_from("<QQ", raw, off + 24)
        sh_entsize, = struct.unpack_from("<Q", raw, off + 56)
        sections.append((sh_type, sh_link, sh_offset, sh_size, sh_entsize))

    names: set[str] = set()
    for sh_type, sh_link, sh_offset, sh_size, sh_entsize in sections:
        if sh_type != _SHT_DYNSYM or sh_entsize == 0:
            continue
        str_off, str_size = sections[sh_link][2], sections[sh_link][3]
        strtab = raw[str_off:str_off + str_size]
        for off in range(sh_offset, sh_offset + sh_size, sh_entsize):
            st_name, st_info = struct.unpack_from("<IB", raw, off)
            st_shndx, = struct.unpack_from("<H", raw, off + 6)
            bind, typ = st_info >> 4, st_info & 0xF
            if typ != _STT_FUNC or st_shndx == _SHN_UNDEF:
                continue
            if bind not in (_STB_GLOBAL, _STB_WEAK):
                continue
            end = strtab.index(b"\x00", st_name)
            name = strtab[st_name:end].decode("ascii", "replace")
            if name:
                names.add(name)
    return sorted(names)
