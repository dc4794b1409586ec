"""Machine-readable binding files.

JSON with top-level keys `module`, `mode`, `level`, `interfaces`, `enums`,
`records`, `consts`, `callbacks` plus `aliases`; arrays keep source order,
plain integers are decimal, and 32-bit word values are spelled as "0x..."
strings.  `load_binding_file` is the exact inverse of `emit_binding_file`
and reports violations with a JSON-path to the offending field.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from mlidl import semtypes as st
from mlidl.binding import model


class SchemaViolation(Exception):
    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def emit_binding_file(desc: model.BindingDesc) -> str:
    doc: dict[str, Any] = {
        "module": desc.module,
        "mode": desc.mode,
        "level": desc.level,
        "interfaces": [_iface_json(i) for i in desc.interfaces],
        "enums": [
            {"name": e.name,
             "variants": [[n, f"0x{v:x}"] for n, v in e.variants]}
            for e in desc.enums
        ],
        "records": [
            {"name": r.name,
             "size": r.size,
             "fields": [
                 {"name": f.name, "type": f.display,
                  "sem": st.sem_to_json(f.sem), "offset": f.offset}
                 for f in r.fields
             ]}
            for r in desc.records
        ],
        "consts": [
            {"name": c.name, "type": c.display, "form": c.form,
             "value": f"0x{c.value:x}" if c.form == "word" else c.value}
            for c in desc.consts
        ],
        "callbacks": [
            {"name": c.name, "sig": _sig_json(c.sig)} for c in desc.callbacks
        ],
        "aliases": [
            {"name": a.name, "type": a.display, "sem": st.sem_to_json(a.sem)}
            for a in desc.aliases
        ],
    }
    if desc.clsid is not None:
        doc["clsid"] = desc.clsid
    return json.dumps(doc, indent=2) + "\n"


def _iface_json(i: model.InterfaceDesc) -> dict[str, Any]:
    return {
        "name": i.name,
        "source": i.source,
        "parent": i.parent,
        "iid": i.iid,
        "ops": [_sig_json(op) for op in i.ops],
    }


def _sig_json(sig: model.LiftedSig) -> dict[str, Any]:
    return {
        "name": sig.name,
        "kind": sig.kind,
        "callback": sig.callback,
        "params": [
            {"name": p.name, "type": p.display, "sem": st.sem_to_json(p.sem),
             "dir": p.dir, "byref": p.byref}
            for p in sig.params
        ],
        "ret": None if sig.ret is None else
               {"type": sig.ret.display, "sem": st.sem_to_json(sig.ret.sem)},
    }


# -- loading -----------------------------------------------------------------

def load_binding_file(text: str) -> model.BindingDesc:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"not valid JSON: {exc}") from None
    _need(doc, dict, "$")
    for key in ("module", "mode", "level", "interfaces", "enums", "records",
                "consts", "callbacks", "aliases"):
        if key not in doc:
            raise SchemaViolation("$", f"missing key {key!r}")

    module = _str(doc, "module", "$")
    mode = _str(doc, "mode", "$")
    if mode not in ("static", "dynamic", "com"):
        raise SchemaViolation("$.mode", f"unknown mode {mode!r}")
    level = _str(doc, "level", "$")
    if level not in ("abstract", "auto"):
        raise SchemaViolation("$.level", f"unknown level {level!r}")
    clsid = doc.get("clsid")
    if clsid is not None and not isinstance(clsid, str):
        raise SchemaViolation("$.clsid", "expected a string")

    interfaces = tuple(
        _load_iface(x, f"$.interfaces[{i}]")
        for i, x in enumerate(_list(doc, "interfaces", "$"))
    )
    enums = tuple(
        _load_enum(x, f"$.enums[{i}]")
        for i, x in enumerate(_list(doc, "enums", "$"))
    )
    records = tuple(
        _load_record(x, f"$.records[{i}]")
        for i, x in enumerate(_list(doc, "records", "$"))
    )
    consts = tuple(
        _load_const(x, f"$.consts[{i}]")
        for i, x in enumerate(_list(doc, "consts", "$"))
    )
    callbacks = tuple(
        model.CallbackDef(
            name=_str(x, "name", f"$.callbacks[{i}]"),
            sig=_load_sig(_need_key(x, "sig", f"$.callbacks[{i}]"),
                          f"$.callbacks[{i}].sig"),
        )
        for i, x in enumerate(_list(doc, "callbacks", "$"))
    )
    aliases = tuple(
        model.AliasDef(
            name=_str(x, "name", f"$.aliases[{i}]"),
            display=_str(x, "type", f"$.aliases[{i}]"),
            sem=st.sem_from_json(_need_key(x, "sem", f"$.aliases[{i}]"),
                                 f"$.aliases[{i}].sem"),
        )
        for i, x in enumerate(_list(doc, "aliases", "$"))
    )
    return model.BindingDesc(
        module=module, mode=mode, level=level, interfaces=interfaces,
        enums=enums, records=records, consts=consts, callbacks=callbacks,
        aliases=aliases, clsid=clsid,
    )


def _load_iface(x: Any, path: str) -> model.InterfaceDesc:
    _need(x, dict, path)
    source = x.get("source")
    parent = x.get("parent")
    iid = x.get("iid")
    for key, val in (("source", source), ("parent", parent), ("iid", iid)):
        if val is not None and not isinstance(val, str):
            raise SchemaViolation(f"{path}.{key}", "expected a string or null")
    ops = tuple(
        _load_sig(op, f"{path}.ops[{i}]")
        for i, op in enumerate(_list(x, "ops", path))
    )
    return model.InterfaceDesc(name=_str(x, "name", path), ops=ops,
                               source=source, parent=parent, iid=iid)


def _load_sig(x: Any, path: str) -> model.LiftedSig:
    _need(x, dict, path)
    kind = x.get("kind", "method")
    if kind not in ("method", "query_interface"):
        raise SchemaViolation(f"{path}.kind", f"unknown kind {kind!r}")
    params = []
    for i, p in enumerate(_list(x, "params", path)):
        ppath = f"{path}.params[{i}]"
        _need(p, dict, ppath)
        direction = _str(p, "dir", ppath)
        if direction not in ("in", "out", "inout"):
            raise SchemaViolation(f"{ppath}.dir", f"unknown direction {direction!r}")
        params.append(model.ParamSig(
            name=_str(p, "name", ppath),
            display=_str(p, "type", ppath),
            sem=st.sem_from_json(_need_key(p, "sem", ppath), f"{ppath}.sem"),
            dir=direction,
            byref=bool(p.get("byref", False)),
        ))
    ret_obj = x.get("ret")
    ret: Optional[model.RetSig] = None
    if ret_obj is not None:
        rpath = f"{path}.ret"
        _need(ret_obj, dict, rpath)
        ret = model.RetSig(
            display=_str(ret_obj, "type", rpath),
            sem=st.sem_from_json(_need_key(ret_obj, "sem", rpath), f"{rpath}.sem"),
        )
    return model.LiftedSig(name=_str(x, "name", path), params=tuple(params),
                           ret=ret, kind=kind, callback=bool(x.get("callback", False)))


def _load_enum(x: Any, path: str) -> model.EnumMap:
    _need(x, dict, path)
    variants = []
    for i, pair in enumerate(_list(x, "variants", path)):
        vpath = f"{path}.variants[{i}]"
        if (not isinstance(pair, list) or len(pair) != 2
                or not isinstance(pair[0], str)):
            raise SchemaViolation(vpath, "expected [name, \"0x...\"]")
        variants.append((pair[0], _word(pair[1], vpath)))
    return model.EnumMap(name=_str(x, "name", path), variants=tuple(variants))


def _load_record(x: Any, path: str) -> model.RecordLayout:
    _need(x, dict, path)
    fields = []
    for i, f in enumerate(_list(x, "fields", path)):
        fpath = f"{path}.fields[{i}]"
        _need(f, dict, fpath)
        offset = f.get("offset")
        if not isinstance(offset, int) or offset < 0:
            raise SchemaViolation(f"{fpath}.offset", "expected a non-negative int")
        fields.append(model.FieldLayout(
            name=_str(f, "name", fpath),
            display=_str(f, "type", fpath),
            sem=st.sem_from_json(_need_key(f, "sem", fpath), f"{fpath}.sem"),
            offset=offset,
        ))
    size = x.get("size")
    if not isinstance(size, int) or size < 0:
        raise SchemaViolation(f"{path}.size", "expected a non-negative int")
    return model.RecordLayout(name=_str(x, "name", path), fields=tuple(fields),
                              size=size)


def _load_const(x: Any, path: str) -> model.ConstDef:
    _need(x, dict, path)
    form = _str(x, "form", path)
    if form not in ("string", "int", "word"):
        raise SchemaViolation(f"{path}.form", f"unknown const form {form!r}")
    value = x.get("value")
    if form == "string":
        if not isinstance(value, str):
            raise SchemaViolation(f"{path}.value", "expected a string")
    elif form == "int":
        if not isinstance(value, int):
            raise SchemaViolation(f"{path}.value", "expected a decimal integer")
    else:
        value = _word(value, f"{path}.value")
    return model.ConstDef(name=_str(x, "name", path),
                          display=_str(x, "type", path), value=value, form=form)


def _word(value: Any, path: str) -> int:
    if not isinstance(value, str) or not value.startswith("0x"):
        raise SchemaViolation(path, 'expected a word as "0x..."')
    try:
        n = int(value, 16)
    except ValueError:
        raise SchemaViolation(path, f"bad hex word {value!r}") from None
    if n > 0xFFFFFFFF:
        raise SchemaViolation(path, f"word {value} does not fit in 32 bits")
    return n


def _need(x: Any, typ: type, path: str) -> None:
    if not isinstance(x, typ):
        raise SchemaViolation(path, f"expected {typ.__name__}")


def _need_key(x: dict, key: str, path: str) -> Any:
    if key not in x:
        raise SchemaViolation(path, f"missing key {key!r}")
    return x[key]


def _str(x: dict, key: str, path: str) -> str:
    v = x.get(key)
    if not isinstance(v, str):
        raise SchemaViolation(f"{path}.{key}", "expected a string")
    return v


def _list(x: dict, key: str, path: str) -> list:
    v = x.get(key)
    if not isinstance(v, list):
        raise SchemaViolation(f"{path}.{key}", "expected an array")
    return v
