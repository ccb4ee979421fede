import json
import sys
import threading

_OAL_INT_MIN = -(2 ** 63)
_OAL_INT_MAX = 2 ** 63 - 1
_OAL_MAX_DEPTH = 1024


class _OalError(Exception):
    def __init__(self, kind, message):
        Exception.__init__(self, kind + ": " + message)
        self.kind = kind


class _OalVoid:
    def __repr__(self):
        return "void"


_oal_void = _OalVoid()


class _OalObject:
    pass


class _OalSet:
    def __init__(self, objs):
        seen = {}
        for o in objs:
            seen[o._oal_id] = o
        self.items = [seen[k] for k in sorted(seen)]

    def ids(self):
        return [o._oal_id for o in self.items]


_oal_next_id = 0
_oal_steps = 0
_oal_depth = 0
_oal_live = {}


def _oal_fail(kind, message):
    raise _OalError(kind, message)


def _oal_cmd():
    global _oal_steps
    if _oal_steps >= _OAL_BUDGET:
        _oal_fail("step-budget-exhausted", "step budget exhausted")
    _oal_steps += 1


def _oal_type(v):
    t = type(v)
    if t is bool:
        return "Boolean"
    if t is int:
        return "Integer"
    if t is float:
        return "Real"
    if t is str:
        return "String"
    if t is _OalSet:
        return "InstanceSet"
    return "Handle"


def _oal_is_a(cls, ancestor):
    return ancestor in _OAL_LINEAGE[cls]


def _oal_init(obj, cls, attrs):
    global _oal_next_id
    _oal_next_id += 1
    obj._oal_id = _oal_next_id
    obj._oal_class = cls
    obj._oal_attrs = attrs
    obj._oal_dead = False
    _oal_live[obj._oal_id] = obj
    for c in _OAL_LINEAGE[cls]:
        _OAL_REGISTRY[c].append(obj)


def _oal_deref(v):
    if v is None:
        _oal_fail("none-dereference", "use of none")
    if not isinstance(v, _OalObject):
        _oal_fail("type-mismatch", "expected a handle, found " + _oal_type(v))
    if v._oal_dead:
        _oal_fail("stale-handle", "use of deleted instance %d" % v._oal_id)
    return v


def _oal_bool(v):
    if type(v) is not bool:
        _oal_fail("type-mismatch", "expected a Boolean, found " + _oal_type(v))
    return v


def _oal_int(v):
    if v < _OAL_INT_MIN or v > _OAL_INT_MAX:
        _oal_fail("arithmetic-overflow", "integer overflow")
    return v


def _oal_real(v):
    if v != v or v in (float("inf"), float("-inf")):
        _oal_fail("arithmetic-overflow", "real overflow")
    return v


def _oal_num(v):
    t = type(v)
    if t is int:
        return float(v)
    if t is float:
        return v
    return None


def _oal_mismatch(op, l, r):
    _oal_fail("type-mismatch", "cannot apply %s to %s and %s" % (op, _oal_type(l), _oal_type(r)))


def _oal_bin(op, l, r):
    tl = type(l)
    tr = type(r)
    if op in ("+", "-", "*"):
        if tl is int and tr is int:
            if op == "+":
                return _oal_int(l + r)
            if op == "-":
                return _oal_int(l - r)
            return _oal_int(l * r)
        if op == "+" and tl is str and tr is str:
            return l + r
        a = _oal_num(l)
        b = _oal_num(r)
        if a is None or b is None:
            _oal_mismatch(op, l, r)
        try:
            if op == "+":
                return _oal_real(a + b)
            if op == "-":
                return _oal_real(a - b)
            return _oal_real(a * b)
        except OverflowError:
            _oal_fail("arithmetic-overflow", "real overflow")
    if op == "/":
        a = _oal_num(l)
        b = _oal_num(r)
        if a is None or b is None:
            _oal_mismatch(op, l, r)
        if b == 0.0:
            _oal_fail("division-by-zero", "division by zero")
        try:
            return _oal_real(a / b)
        except OverflowError:
            _oal_fail("arithmetic-overflow", "real overflow")
    if op in ("==", "!="):
        eq = _oal_equals(op, l, r)
        return eq if op == "==" else not eq
    if tl is int and tr is int or tl is str and tr is str:
        a = l
        b = r
    else:
        a = _oal_num(l)
        b = _oal_num(r)
        if a is None or b is None:
            _oal_mismatch(op, l, r)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def _oal_is_handle(v):
    return v is None or isinstance(v, _OalObject)


def _oal_equals(op, l, r):
    tl = type(l)
    tr = type(r)
    if tl is tr and tl in (int, bool, str):
        return l == r
    if _oal_is_handle(l) and _oal_is_handle(r):
        return l is r
    if tl is _OalSet and tr is _OalSet:
        return l.ids() == r.ids()
    a = _oal_num(l)
    b = _oal_num(r)
    if a is None or b is None:
        _oal_mismatch(op, l, r)
    return a == b


def _oal_un(op, v):
    t = type(v)
    if op == "-":
        if t is int:
            return _oal_int(-v)
        if t is float:
            return -v
    elif op == "not":
        if t is bool:
            return not v
    elif t is _OalSet or _oal_is_handle(v):
        n = len(v.items) if t is _OalSet else (0 if v is None else 1)
        if op == "cardinality":
            return n
        if op == "empty":
            return n == 0
        return n != 0
    _oal_fail("type-mismatch", "cannot apply %s to %s" % (op, _oal_type(v)))


def _oal_get(v, attr):
    obj = _oal_deref(v)
    if attr not in obj._oal_attrs:
        _oal_fail("unknown-attribute", obj._oal_class + " has no attribute " + attr)
    return obj._oal_attrs[attr]


def _oal_coerce(ty, v):
    t = type(v)
    if ty == "Integer":
        ok = t is int
    elif ty == "Real":
        if t is int:
            return float(v)
        ok = t is float
    elif ty == "Boolean":
        ok = t is bool
    elif ty == "String":
        ok = t is str
    else:
        ok = v is None or isinstance(v, _OalObject) and _oal_is_a(v._oal_class, ty)
    if not ok:
        _oal_fail("type-mismatch", ty + " cannot hold " + _oal_type(v))
    return v


def _oal_set(v, attr, value):
    obj = _oal_deref(v)
    ty = _OAL_ATTR_TYPES[obj._oal_class].get(attr)
    if ty is None:
        _oal_fail("unknown-attribute", obj._oal_class + " has no attribute " + attr)
    obj._oal_attrs[attr] = _oal_coerce(ty, value)


def _oal_invoke(cls, obj, name, args):
    global _oal_depth
    entry = _OAL_METHODS[cls].get(name)
    if entry is None:
        _oal_fail("unknown-method", cls + " has no method " + name)
    fn, static, arity = entry
    if obj is None and not static:
        _oal_fail("type-mismatch", "instance method called without a receiver")
    if len(args) != arity:
        _oal_fail("arity-mismatch", name + " takes %d argument(s)" % arity)
    if _oal_depth >= _OAL_MAX_DEPTH:
        _oal_fail("call-depth-exceeded", "call depth exceeded")
    _oal_depth += 1
    result = fn(*args) if static else fn(obj, *args)
    _oal_depth -= 1
    return None if result is _oal_void else result


def _oal_call(recv, name, args):
    obj = _oal_deref(recv)
    return _oal_invoke(obj._oal_class, obj, name, args)


def _oal_call_static(cls, name, args):
    return _oal_invoke(cls, None, name, args)


def _oal_create(cls):
    k = _OAL_CLASSES.get(cls)
    if k is None:
        _oal_fail("unknown-class", "unknown class " + cls)
    return k()


def _oal_pick(mode, objs):
    if mode == "many":
        return _OalSet(objs)
    return objs[0] if objs else None


def _oal_candidates(cls):
    if cls not in _OAL_REGISTRY:
        _oal_fail("unknown-class", "unknown class " + cls)
    return list(_OAL_REGISTRY[cls])


def _oal_select(cls, mode):
    return _oal_pick(mode, _oal_candidates(cls))


def _oal_no_selected():
    _oal_fail("unknown-variable", "selected outside a where clause")


def _oal_iter(v):
    if type(v) is not _OalSet:
        _oal_fail("type-mismatch", "for each needs an instance set, found " + _oal_type(v))
    return list(v.items)


def _oal_nav(start, mode, chain):
    if start is None:
        cur = []
    elif isinstance(start, _OalObject):
        cur = [_oal_deref(start)]
    elif type(start) is _OalSet:
        for o in start.items:
            _oal_deref(o)
        cur = list(start.items)
    else:
        _oal_fail("type-mismatch", "navigation from " + _oal_type(start))
    for cls, rel in chain:
        if rel not in _OAL_RELATIONS:
            _oal_fail("unknown-relation", "unknown relation " + rel)
        if cls not in _OAL_REGISTRY:
            _oal_fail("unknown-class", "unknown class " + cls)
        found = {}
        for o in cur:
            for a, b in _oal_links[rel]:
                if a == o._oal_id:
                    p = b
                elif b == o._oal_id:
                    p = a
                else:
                    continue
                other = _oal_live[p]
                if _oal_is_a(other._oal_class, cls):
                    found[p] = other
        cur = [found[k] for k in sorted(found)]
    return _oal_pick(mode, cur)


def _oal_orient(a, b, rel):
    oa = _oal_deref(a)
    ob = _oal_deref(b)
    r = _OAL_RELATIONS.get(rel)
    if r is None:
        _oal_fail("unknown-relation", "unknown relation " + rel)
    if _oal_is_a(oa._oal_class, r[0]) and _oal_is_a(ob._oal_class, r[1]):
        return (oa._oal_id, ob._oal_id)
    if _oal_is_a(ob._oal_class, r[0]) and _oal_is_a(oa._oal_class, r[1]):
        return (ob._oal_id, oa._oal_id)
    _oal_fail("type-mismatch", rel + " cannot link " + oa._oal_class + " and " + ob._oal_class)


def _oal_relate(a, b, rel):
    pair = _oal_orient(a, b, rel)
    if pair not in _oal_links[rel]:
        _oal_links[rel].append(pair)


def _oal_unrelate(a, b, rel):
    pair = _oal_orient(a, b, rel)
    if pair in _oal_links[rel]:
        _oal_links[rel].remove(pair)


def _oal_delete(v):
    pending = [_oal_deref(v)]
    while pending:
        obj = pending.pop()
        if obj._oal_dead:
            continue
        oid = obj._oal_id
        parts = []
        for rel in sorted(_oal_links):
            pairs = _oal_links[rel]
            for pair in sorted(p for p in pairs if oid in p):
                pairs.remove(pair)
                if _OAL_RELATIONS[rel][2] and pair[0] == oid and pair[1] != oid:
                    parts.append(_oal_live[pair[1]])
        obj._oal_dead = True
        del _oal_live[oid]
        for c in _OAL_LINEAGE[obj._oal_class]:
            _OAL_REGISTRY[c].remove(obj)
        pending.extend(reversed(parts))


def _oal_jstr(s):
    return json.dumps(s, ensure_ascii=False)


def _oal_vjson(v):
    t = type(v)
    if t is bool:
        return '{"t":"bool","v":%s}' % ("true" if v else "false")
    if t is int:
        return '{"t":"int","v":%d}' % v
    if t is float:
        return '{"t":"real","v":%s}' % repr(v)
    if t is str:
        return '{"t":"str","v":%s}' % _oal_jstr(v)
    if t is _OalSet:
        return '{"t":"set","v":[%s]}' % ",".join(str(i) for i in v.ids())
    if v is None:
        return '{"t":"handle","v":null}'
    return '{"t":"handle","v":%d}' % v._oal_id


_oal_status = "finished"
_oal_result = _oal_void


def __dump_state__():
    instances = []
    for oid in sorted(_oal_live):
        obj = _oal_live[oid]
        attrs = ",".join(_oal_jstr(k) + ":" + _oal_vjson(obj._oal_attrs[k]) for k in sorted(obj._oal_attrs))
        instances.append('{"id":%d,"class":%s,"attrs":{%s}}' % (oid, _oal_jstr(obj._oal_class), attrs))
    links = sorted((rel, a, b) for rel in _oal_links for a, b in _oal_links[rel])
    link_text = ",".join('{"rel":%s,"a":%d,"b":%d}' % (_oal_jstr(r), a, b) for r, a, b in links)
    ret = "null" if _oal_result is _oal_void else _oal_vjson(_oal_result)
    text = '{"instances":[%s],"links":[%s],"status":%s,"return_value":%s}\n' % (
        ",".join(instances), link_text, _oal_jstr(_oal_status), ret)
    sys.stdout.buffer.write(text.encode("utf-8"))
    sys.stdout.flush()


def _oal_execute(entry):
    global _oal_status, _oal_result, _oal_depth
    if entry is not None:
        try:
            _oal_depth = 1
            _oal_result = entry()
        except Exception:
            _oal_status = "failed"
            _oal_result = _oal_void
    __dump_state__()


def _oal_main(entry):
    sys.setrecursionlimit(100000)
    threading.stack_size(512 * 1024 * 1024)
    worker = threading.Thread(target=_oal_execute, args=(entry,))
    worker.start()
    worker.join()
