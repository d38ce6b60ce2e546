"""Micro-interpreter and test runner for the supported Java subset.

The validation harness needs real build/test commands to drive, and this
environment has no JDK, so fixture projects are executed here instead:
``build`` parses every source file, ``test`` runs boolean zero-argument
``test*`` methods and reports JUnit-style XML. The interpreter covers the
statements and library surface the bundled fixtures use; anything outside
that surface raises and shows up as a test error rather than a wrong pass.

Usage: python -m simplikit.interp build SRC_DIR
       python -m simplikit.interp test SRC_DIR [--report FILE]
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional
from xml.sax.saxutils import escape, quoteattr

from .javafile import FileField, JavaFile, parse_java_file
from .syntax import JavaParseError, MethodUnit, Node, _Parser


class InterpreterError(RuntimeError):
    """Runtime surface the interpreter does not model."""


class JavaThrow(Exception):
    def __init__(self, type_name: str, message: str):
        super().__init__(f"{type_name}: {message}")
        self.type_name = type_name
        self.message = message


class _Return(Exception):
    def __init__(self, value: Any):
        self.value = value


class _Break(Exception):
    def __init__(self, label: Optional[str]):
        self.label = label


class _Continue(Exception):
    def __init__(self, label: Optional[str]):
        self.label = label


@dataclass
class JavaExceptionValue:
    type_name: str
    message: str = ""


_THROWABLE_PARENTS = {
    "IllegalArgumentException": "RuntimeException",
    "IllegalStateException": "RuntimeException",
    "ArithmeticException": "RuntimeException",
    "NullPointerException": "RuntimeException",
    "IndexOutOfBoundsException": "RuntimeException",
    "ArrayIndexOutOfBoundsException": "IndexOutOfBoundsException",
    "NumberFormatException": "IllegalArgumentException",
    "RuntimeException": "Exception",
    "IOException": "Exception",
    "SQLException": "Exception",
    "Exception": "Throwable",
}


def _throwable_matches(thrown: str, declared: str) -> bool:
    current: Optional[str] = thrown
    while current is not None:
        if current == declared:
            return True
        current = _THROWABLE_PARENTS.get(current)
    return declared == "Throwable"


def java_str(value: Any) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, list):
        return "[" + ", ".join(java_str(v) for v in value) + "]"
    if isinstance(value, set):
        return "[" + ", ".join(java_str(v) for v in sorted(value, key=java_str)) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{java_str(k)}={java_str(v)}" for k, v in value.items()) + "}"
    if isinstance(value, JavaExceptionValue):
        return f"{value.type_name}: {value.message}"
    return str(value)


@dataclass
class LoadedClass:
    name: str
    methods: dict[str, MethodUnit] = field(default_factory=dict)
    fields: dict[str, FileField] = field(default_factory=dict)
    field_values: dict[str, Any] = field(default_factory=dict)


@dataclass
class LoadedProgram:
    classes: dict[str, LoadedClass] = field(default_factory=dict)
    order: list[str] = field(default_factory=list)


def load_program(src_dir: Path) -> tuple[LoadedProgram, list[str]]:
    """Parse every .java file under ``src_dir``. Returns the program and a
    list of parse-error strings (non-empty means the build fails)."""
    program = LoadedProgram()
    errors: list[str] = []
    for path in sorted(src_dir.rglob("*.java")):
        try:
            jfile = parse_java_file(path.read_text(encoding="utf-8"))
        except JavaParseError as exc:
            errors.append(f"{path}: {exc}")
            continue
        errors.extend(f"{path}: {msg}" for msg in jfile.member_errors)
        errors.extend(_register(program, jfile, path))
    return program, errors


def _register(program: LoadedProgram, jfile: JavaFile, path: Path) -> list[str]:
    errors: list[str] = []
    for method in jfile.methods:
        simple_class = method.class_name.split(".")[-1]
        cls = program.classes.get(simple_class)
        if cls is None:
            cls = LoadedClass(name=simple_class)
            program.classes[simple_class] = cls
            program.order.append(simple_class)
        if method.unit.tree.attrs["body"] is None:
            continue  # abstract/interface methods cannot run; not an error
        cls.methods[method.unit.tree.attrs["name"]] = method.unit
    for fld in jfile.fields:
        simple_class = fld.class_name.split(".")[-1]
        cls = program.classes.setdefault(simple_class, LoadedClass(name=simple_class))
        if simple_class not in program.order:
            program.order.append(simple_class)
        cls.fields[fld.name] = fld
    return errors


class _PrintStream:
    def __init__(self):
        self.lines: list[str] = []


_BUILTIN_CLASSES = frozenset(
    ["Math", "Integer", "Long", "Boolean", "String", "Objects", "Arrays",
     "System", "List", "Set", "Map", "Collections"]
)

_COLLECTION_TYPES = frozenset(
    ["ArrayList", "LinkedList", "HashMap", "LinkedHashMap", "TreeMap",
     "HashSet", "LinkedHashSet", "TreeSet"]
)

_EXCEPTION_TYPES = frozenset(_THROWABLE_PARENTS) | {"Throwable"}


class Interpreter:
    """Evaluates static methods of a loaded program."""

    def __init__(self, program: LoadedProgram, *, step_limit: int = 2_000_000):
        self.program = program
        self.step_limit = step_limit
        self.steps = 0
        self.stdout = _PrintStream()
        self._init_fields()

    # ---- setup ----------------------------------------------------------

    def _init_fields(self) -> None:
        for name in self.program.order:
            cls = self.program.classes[name]
            for fname, fld in cls.fields.items():
                if fld.init_text is None:
                    cls.field_values[fname] = None
                    continue
                try:
                    parser = _Parser(fld.init_text)
                    expr = parser.parse_expression()
                except JavaParseError as exc:
                    raise InterpreterError(
                        f"cannot evaluate field initializer {name}.{fname}: {exc}"
                    )
                cls.field_values[fname] = self._eval(
                    expr, {"__class__": name, "__text__": fld.init_text}
                )

    # ---- public entry ----------------------------------------------------

    def call(self, class_name: str, method_name: str, args: Optional[list] = None) -> Any:
        cls = self.program.classes.get(class_name)
        if cls is None or method_name not in cls.methods:
            raise InterpreterError(f"no such method: {class_name}.{method_name}")
        return self._invoke(cls, cls.methods[method_name], args or [])

    # ---- machinery -------------------------------------------------------

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_limit:
            raise InterpreterError("step limit exceeded (possible infinite loop)")

    def _invoke(self, cls: LoadedClass, unit: MethodUnit, args: list) -> Any:
        params = unit.tree.attrs["params"]
        if len(params) != len(args):
            raise InterpreterError(
                f"arity mismatch calling {cls.name}.{unit.tree.attrs['name']}"
            )
        env: dict[str, Any] = {"__class__": cls.name, "__text__": unit.text}
        for (_, pname), value in zip(params, args):
            env[pname] = value
        body = unit.tree.attrs["body"]
        try:
            self._exec_block(body, env)
        except _Return as ret:
            return ret.value
        return None

    def _node_text(self, node: Node, env: dict) -> str:
        return node.text(env["__text__"])

    # ---- statements ------------------------------------------------------

    def _exec_block(self, block: Node, env: dict) -> None:
        for stmt in block.children:
            self._exec(stmt, env)

    def _exec(self, node: Node, env: dict, label: Optional[str] = None) -> None:
        self._tick()
        kind = node.kind
        if kind == "block":
            self._exec_block(node, env)
        elif kind == "empty":
            pass
        elif kind == "local-var-decl":
            for d in node.attrs["declarators"]:
                value = self._eval(d["init"], env) if d["init"] is not None else None
                env[d["name"]] = value
        elif kind == "expr-stmt":
            self._eval(node.children[0], env)
        elif kind == "if":
            if self._truthy(self._eval(node.attrs["cond"], env)):
                self._exec(node.attrs["then"], env)
            elif node.attrs["else"] is not None:
                self._exec(node.attrs["else"], env)
        elif kind in ("while", "do", "for", "foreach"):
            self._exec_loop(node, env, label)
        elif kind == "switch":
            self._exec_switch(node, env)
        elif kind == "try":
            self._exec_try(node, env)
        elif kind == "return":
            value = node.attrs["value"]
            raise _Return(self._eval(value, env) if value is not None else None)
        elif kind == "throw":
            thrown = self._eval(node.attrs["value"], env)
            if isinstance(thrown, JavaExceptionValue):
                raise JavaThrow(thrown.type_name, thrown.message)
            raise InterpreterError("throw of a non-exception value")
        elif kind == "break":
            raise _Break(node.attrs.get("label"))
        elif kind == "continue":
            raise _Continue(node.attrs.get("label"))
        elif kind == "labeled":
            self._exec(node.children[0], env, label=node.attrs["label"])
        else:
            raise InterpreterError(f"statement kind '{kind}' not supported")

    def _exec_loop(self, node: Node, env: dict, label: Optional[str]) -> None:
        kind = node.kind

        def run_body(body: Node) -> bool:
            """Returns False when the loop must stop."""
            try:
                self._exec(body, env)
            except _Break as brk:
                if brk.label is None or brk.label == label:
                    return False
                raise
            except _Continue as cont:
                if cont.label is None or cont.label == label:
                    return True
                raise
            return True

        if kind == "while":
            while self._truthy(self._eval(node.attrs["cond"], env)):
                self._tick()
                if not run_body(node.attrs["body"]):
                    break
        elif kind == "do":
            while True:
                self._tick()
                if not run_body(node.attrs["body"]):
                    break
                if not self._truthy(self._eval(node.attrs["cond"], env)):
                    break
        elif kind == "for":
            init, cond, update = node.attrs["init"], node.attrs["cond"], node.attrs["update"]
            if init is not None:
                if init.kind == "local-var-decl":
                    self._exec(init, env)
                elif init.kind == "expr-list":
                    for e in init.children:
                        self._eval(e, env)
                else:
                    self._eval(init, env)
            while cond is None or self._truthy(self._eval(cond, env)):
                self._tick()
                if not run_body(node.attrs["body"]):
                    return
                if update is not None:
                    if update.kind == "expr-list":
                        for e in update.children:
                            self._eval(e, env)
                    else:
                        self._eval(update, env)
        elif kind == "foreach":
            iterable = self._eval(node.attrs["iterable"], env)
            if iterable is None:
                raise JavaThrow("NullPointerException", "iterating null")
            if isinstance(iterable, dict):
                raise InterpreterError("foreach over a map is not supported")
            items = sorted(iterable, key=java_str) if isinstance(iterable, set) else list(iterable)
            for item in items:
                self._tick()
                env[node.attrs["var_name"]] = item
                if not run_body(node.attrs["body"]):
                    break

    def _exec_switch(self, node: Node, env: dict) -> None:
        selector = self._eval(node.attrs["selector"], env)
        cases = node.attrs["cases"]
        match_index = None
        default_index = None
        for i, case in enumerate(cases):
            if case.attrs["default"]:
                default_index = i
                continue
            label_value = self._eval(case.children[0], env)
            if self._java_equals(selector, label_value):
                match_index = i
                break
        start = match_index if match_index is not None else default_index
        if start is None:
            return
        try:
            for case in cases[start:]:
                for stmt in case.attrs["statements"]:
                    self._exec(stmt, env)
        except _Break as brk:
            if brk.label is not None:
                raise

    def _exec_try(self, node: Node, env: dict) -> None:
        resources = node.attrs["resources"]
        opened: list[Any] = []
        try:
            for res in resources:
                for d in res.attrs["declarators"]:
                    value = self._eval(d["init"], env) if d["init"] is not None else None
                    env[d["name"]] = value
                    opened.append(value)
            try:
                self._exec(node.attrs["block"], env)
            except JavaThrow as thrown:
                for clause in node.attrs["catches"]:
                    if any(
                        _throwable_matches(thrown.type_name, declared.split("<")[0])
                        for declared in clause.attrs["types"]
                    ):
                        env[clause.attrs["name"]] = JavaExceptionValue(
                            thrown.type_name, thrown.message
                        )
                        self._exec(clause.attrs["block"], env)
                        return
                raise
        finally:
            for value in reversed(opened):
                self._close_quietly(value)
            fin = node.attrs["finally"]
            if fin is not None:
                self._exec(fin.children[0], env)

    def _close_quietly(self, value: Any) -> None:
        if value is None:
            return
        # Resources in fixtures are plain values; close is a no-op.

    # ---- expressions -----------------------------------------------------

    def _truthy(self, value: Any) -> bool:
        if isinstance(value, bool):
            return value
        raise InterpreterError(f"condition is not boolean: {java_str(value)}")

    def _java_equals(self, a: Any, b: Any) -> bool:
        if a is None or b is None:
            return a is b
        if isinstance(a, bool) != isinstance(b, bool):
            return False
        return a == b

    def _eval(self, node: Node, env: dict) -> Any:
        self._tick()
        kind = node.kind
        if kind == "literal":
            return self._literal(node.attrs["value"])
        if kind == "name":
            return self._lookup(node.attrs["name"], env)
        if kind == "paren":
            return self._eval(node.attrs["inner"], env)
        if kind == "binary":
            return self._binary(node, env)
        if kind == "unary":
            return self._unary(node, env)
        if kind == "ternary":
            if self._truthy(self._eval(node.attrs["cond"], env)):
                return self._eval(node.attrs["then"], env)
            return self._eval(node.attrs["else"], env)
        if kind == "assign":
            return self._assign(node, env)
        if kind == "call":
            return self._call(node, env)
        if kind == "field-access":
            return self._field_access(node, env)
        if kind == "array-access":
            return self._array_access(node, env)
        if kind == "object-creation":
            return self._create(node, env)
        if kind == "array-creation":
            return self._create_array(node, env)
        if kind == "array-init":
            return [self._eval(child, env) for child in node.children]
        if kind == "cast":
            return self._cast(node, env)
        raise InterpreterError(f"expression kind '{kind}' not supported")

    def _literal(self, text: str) -> Any:
        if text == "true":
            return True
        if text == "false":
            return False
        if text == "null":
            return None
        if text.startswith('"'):
            return self._unescape(text[1:-1])
        if text.startswith("'"):
            inner = self._unescape(text[1:-1])
            return inner
        lowered = text.lower().rstrip("l")
        try:
            if lowered.startswith("0x"):
                return int(lowered, 16)
            if lowered.startswith("0b"):
                return int(lowered, 2)
            if any(c in lowered for c in (".", "e")) or lowered.endswith(("f", "d")):
                return float(lowered.rstrip("fd"))
            return int(lowered.replace("_", ""))
        except ValueError:
            raise InterpreterError(f"cannot evaluate literal {text!r}")

    @staticmethod
    def _unescape(body: str) -> str:
        out: list[str] = []
        i = 0
        escapes = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", '"': '"', "'": "'", "0": "\0"}
        while i < len(body):
            ch = body[i]
            if ch == "\\" and i + 1 < len(body):
                out.append(escapes.get(body[i + 1], body[i + 1]))
                i += 2
            else:
                out.append(ch)
                i += 1
        return "".join(out)

    def _lookup(self, name: str, env: dict) -> Any:
        if name in env:
            return env[name]
        cls = self.program.classes.get(env["__class__"])
        if cls is not None and name in cls.field_values:
            return cls.field_values[name]
        if name in self.program.classes or name in _BUILTIN_CLASSES:
            return ("__class__", name)
        if name == "this":
            raise InterpreterError("'this' is not supported (static methods only)")
        raise InterpreterError(f"unknown name '{name}'")

    def _binary(self, node: Node, env: dict) -> Any:
        op = node.attrs["op"]
        if op == "&&":
            return self._truthy(self._eval(node.attrs["left"], env)) and self._truthy(
                self._eval(node.attrs["right"], env)
            )
        if op == "||":
            return self._truthy(self._eval(node.attrs["left"], env)) or self._truthy(
                self._eval(node.attrs["right"], env)
            )
        if op == "instanceof":
            left = self._eval(node.attrs["left"], env)
            type_name = node.attrs["right"].attrs["name"].split("<")[0].strip()
            return self._instance_of(left, type_name)
        left = self._eval(node.attrs["left"], env)
        right = self._eval(node.attrs["right"], env)
        return self._apply_binary(op, left, right)

    def _instance_of(self, value: Any, type_name: str) -> bool:
        mapping = {
            "String": str,
            "Integer": int,
            "Long": int,
            "Boolean": bool,
            "Double": float,
        }
        if type_name in mapping:
            if type_name in ("Integer", "Long") and isinstance(value, bool):
                return False
            return isinstance(value, mapping[type_name])
        if type_name in ("List", "ArrayList"):
            return isinstance(value, list)
        if type_name in ("Map", "HashMap"):
            return isinstance(value, dict)
        if type_name in ("Set", "HashSet"):
            return isinstance(value, set)
        if type_name == "Object":
            return value is not None
        raise InterpreterError(f"instanceof {type_name} not supported")

    def _apply_binary(self, op: str, left: Any, right: Any) -> Any:
        if op == "+":
            if isinstance(left, str) or isinstance(right, str):
                return java_str(left) + java_str(right)
            self._require_numbers(op, left, right)
            return left + right
        if op in ("-", "*"):
            self._require_numbers(op, left, right)
            return left - right if op == "-" else left * right
        if op == "/":
            self._require_numbers(op, left, right)
            if isinstance(left, int) and isinstance(right, int):
                if right == 0:
                    raise JavaThrow("ArithmeticException", "/ by zero")
                quotient = abs(left) // abs(right)
                return quotient if (left >= 0) == (right >= 0) else -quotient
            return left / right
        if op == "%":
            self._require_numbers(op, left, right)
            if isinstance(left, int) and isinstance(right, int):
                if right == 0:
                    raise JavaThrow("ArithmeticException", "/ by zero")
                return left - (self._apply_binary("/", left, right)) * right
            return left % right
        if op in ("<", "<=", ">", ">="):
            self._require_numbers(op, left, right)
            return {"<": left < right, "<=": left <= right, ">": left > right, ">=": left >= right}[op]
        if op == "==":
            return self._java_equals(left, right)
        if op == "!=":
            return not self._java_equals(left, right)
        if op in ("&", "|", "^"):
            if isinstance(left, bool) and isinstance(right, bool):
                return {"&": left and right, "|": left or right, "^": left != right}[op]
            self._require_numbers(op, left, right)
            return {"&": left & right, "|": left | right, "^": left ^ right}[op]
        if op in ("<<", ">>", ">>>"):
            self._require_numbers(op, left, right)
            if op == "<<":
                return left << right
            if op == ">>":
                return left >> right
            return (left % (1 << 32)) >> right if left < 0 else left >> right
        raise InterpreterError(f"operator '{op}' not supported")

    def _require_numbers(self, op: str, left: Any, right: Any) -> None:
        for value in (left, right):
            if value is None:
                raise JavaThrow("NullPointerException", f"null operand to '{op}'")
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InterpreterError(f"non-numeric operand to '{op}': {java_str(value)}")

    def _unary(self, node: Node, env: dict) -> Any:
        op = node.attrs["op"]
        operand = node.attrs["operand"]
        if op in ("++", "--"):
            old = self._eval(operand, env)
            if old is None or isinstance(old, bool) or not isinstance(old, (int, float)):
                raise InterpreterError(f"cannot apply '{op}' to {java_str(old)}")
            new = old + 1 if op == "++" else old - 1
            self._store(operand, new, env)
            return new if node.attrs["prefix"] else old
        value = self._eval(operand, env)
        if op == "!":
            return not self._truthy(value)
        if op == "-":
            self._require_numbers(op, value, 0)
            return -value
        if op == "+":
            self._require_numbers(op, value, 0)
            return value
        if op == "~":
            self._require_numbers(op, value, 0)
            return ~value
        raise InterpreterError(f"unary '{op}' not supported")

    def _assign(self, node: Node, env: dict) -> Any:
        op = node.attrs["op"]
        value = self._eval(node.attrs["value"], env)
        target = node.attrs["target"]
        if op != "=":
            current = self._eval(target, env)
            value = self._apply_binary(op[:-1], current, value)
        self._store(target, value, env)
        return value

    def _store(self, target: Node, value: Any, env: dict) -> None:
        kind = target.kind
        if kind == "paren":
            self._store(target.attrs["inner"], value, env)
            return
        if kind == "name":
            name = target.attrs["name"]
            if name in env:
                env[name] = value
                return
            cls = self.program.classes.get(env["__class__"])
            if cls is not None and name in cls.field_values:
                cls.field_values[name] = value
                return
            env[name] = value
            return
        if kind == "array-access":
            array = self._eval(target.attrs["array"], env)
            index = self._eval(target.attrs["index"], env)
            self._check_index(array, index)
            array[index] = value
            return
        if kind == "field-access":
            receiver = target.attrs["receiver"]
            if receiver.kind == "name":
                owner = self._lookup(receiver.attrs["name"], env)
                if isinstance(owner, tuple) and owner[0] == "__class__":
                    cls = self.program.classes.get(owner[1])
                    if cls is not None and target.attrs["name"] in cls.field_values:
                        cls.field_values[target.attrs["name"]] = value
                        return
        raise InterpreterError(f"cannot assign to {kind}")

    def _check_index(self, array: Any, index: Any) -> None:
        if array is None:
            raise JavaThrow("NullPointerException", "null array")
        if not isinstance(array, list):
            raise InterpreterError("indexing a non-array value")
        if not isinstance(index, int) or isinstance(index, bool):
            raise InterpreterError("array index is not an int")
        if index < 0 or index >= len(array):
            raise JavaThrow("ArrayIndexOutOfBoundsException", f"index {index}")

    def _array_access(self, node: Node, env: dict) -> Any:
        array = self._eval(node.attrs["array"], env)
        index = self._eval(node.attrs["index"], env)
        self._check_index(array, index)
        return array[index]

    def _field_access(self, node: Node, env: dict) -> Any:
        receiver_node = node.attrs["receiver"]
        name = node.attrs["name"]
        receiver = self._eval(receiver_node, env)
        if isinstance(receiver, tuple) and receiver and receiver[0] == "__class__":
            return self._static_field(receiver[1], name)
        if isinstance(receiver, list) and name == "length":
            return len(receiver)
        raise InterpreterError(f"field '{name}' not supported on {java_str(receiver)}")

    def _static_field(self, class_name: str, name: str) -> Any:
        cls = self.program.classes.get(class_name)
        if cls is not None and name in cls.field_values:
            return cls.field_values[name]
        builtin = {
            ("Integer", "MAX_VALUE"): 2**31 - 1,
            ("Integer", "MIN_VALUE"): -(2**31),
            ("Long", "MAX_VALUE"): 2**63 - 1,
            ("System", "out"): ("__stdout__",),
        }
        if (class_name, name) in builtin:
            return builtin[(class_name, name)]
        raise InterpreterError(f"unknown static field {class_name}.{name}")

    def _create(self, node: Node, env: dict) -> Any:
        type_name = node.attrs["type_name"].split(".")[-1]
        args = [self._eval(a, env) for a in node.attrs["args"]]
        if type_name in ("ArrayList", "LinkedList"):
            if args and isinstance(args[0], (list, set)):
                return list(args[0])
            return []
        if type_name in ("HashMap", "LinkedHashMap", "TreeMap"):
            if args and isinstance(args[0], dict):
                return dict(args[0])
            return {}
        if type_name in ("HashSet", "LinkedHashSet", "TreeSet"):
            if args and isinstance(args[0], (list, set)):
                return set(args[0])
            return set()
        if type_name == "StringBuilder":
            raise InterpreterError("StringBuilder not supported")
        if type_name in _EXCEPTION_TYPES:
            return JavaExceptionValue(type_name, java_str(args[0]) if args else "")
        if type_name == "String":
            return java_str(args[0]) if args else ""
        raise InterpreterError(f"cannot instantiate '{type_name}'")

    def _create_array(self, node: Node, env: dict) -> Any:
        init = node.attrs["init"]
        if init is not None:
            return [self._eval(child, env) for child in init.children]
        dims = [self._eval(d, env) for d in node.children]
        if not dims:
            raise InterpreterError("array creation without size")

        def build(level: int) -> Any:
            if level >= len(dims):
                return None
            size = dims[level]
            if level == len(dims) - 1:
                fill = 0 if node.attrs["type_name"] in ("int", "long", "short", "byte", "double", "float") else (
                    False if node.attrs["type_name"] == "boolean" else None
                )
                return [fill] * size
            return [build(level + 1) for _ in range(size)]

        return build(0)

    def _cast(self, node: Node, env: dict) -> Any:
        value = self._eval(node.attrs["operand"], env)
        target = node.attrs["type"].strip()
        if target in ("int", "long", "short", "byte"):
            if isinstance(value, float):
                return int(value)
            return value
        if target in ("double", "float"):
            return float(value) if isinstance(value, (int, float)) else value
        return value

    # ---- calls ------------------------------------------------------------

    def _call(self, node: Node, env: dict) -> Any:
        name = node.attrs["name"]
        args = [self._eval(a, env) for a in node.attrs["args"]]
        receiver_node = node.attrs["receiver"]

        if receiver_node is None:
            cls = self.program.classes.get(env["__class__"])
            if cls is not None and name in cls.methods:
                return self._invoke(cls, cls.methods[name], args)
            for other_name in self.program.order:
                other = self.program.classes[other_name]
                if name in other.methods:
                    return self._invoke(other, other.methods[name], args)
            raise InterpreterError(f"unknown method '{name}'")

        receiver = self._eval(receiver_node, env)
        if isinstance(receiver, tuple) and receiver:
            if receiver[0] == "__class__":
                return self._static_call(receiver[1], name, args)
            if receiver[0] == "__stdout__":
                return self._stdout_call(name, args)
        return self._value_call(receiver, name, args)

    def _static_call(self, class_name: str, name: str, args: list) -> Any:
        cls = self.program.classes.get(class_name)
        if cls is not None and name in cls.methods:
            return self._invoke(cls, cls.methods[name], args)
        key = (class_name, name)
        if class_name == "Math":
            import math

            table = {
                "max": max,
                "min": min,
                "abs": abs,
                "floor": lambda x: float(math.floor(x)),
                "ceil": lambda x: float(math.ceil(x)),
                "pow": lambda a, b: float(a) ** b,
                "sqrt": math.sqrt,
            }
            if name in table:
                return table[name](*args)
        if class_name == "Integer":
            if name == "parseInt":
                try:
                    return int(args[0])
                except (TypeError, ValueError):
                    raise JavaThrow("NumberFormatException", java_str(args[0]))
            if name == "valueOf":
                return int(args[0]) if isinstance(args[0], str) else args[0]
            if name == "toString":
                return java_str(args[0])
        if class_name == "String" and name == "valueOf":
            return java_str(args[0])
        if class_name == "Boolean" and name in ("parseBoolean", "valueOf"):
            return args[0] == "true" if isinstance(args[0], str) else bool(args[0])
        if class_name == "Objects":
            if name == "equals":
                return self._java_equals(args[0], args[1])
            if name == "isNull":
                return args[0] is None
            if name == "nonNull":
                return args[0] is not None
            if name == "requireNonNull":
                if args[0] is None:
                    raise JavaThrow("NullPointerException", "required non-null")
                return args[0]
            if name == "hash":
                return hash(tuple(java_str(a) for a in args))
        if class_name == "Arrays":
            if name == "asList":
                return list(args)
            if name == "toString":
                return java_str(args[0])
            if name == "fill":
                target, value = args
                for i in range(len(target)):
                    target[i] = value
                return None
            if name == "copyOf":
                source, size = args
                out = list(source[:size])
                out.extend([0] * (size - len(out)))
                return out
        if class_name == "List" and name == "of":
            return list(args)
        if class_name == "Set" and name == "of":
            return set(args)
        if class_name == "Collections":
            if name == "emptyList":
                return []
            if name == "singletonList":
                return [args[0]]
            if name == "unmodifiableList":
                return args[0]
        raise InterpreterError(f"unknown static call {key[0]}.{key[1]}")

    def _stdout_call(self, name: str, args: list) -> Any:
        if name in ("println", "print"):
            text = java_str(args[0]) if args else ""
            self.stdout.lines.append(text)
            return None
        raise InterpreterError(f"System.out.{name} not supported")

    def _value_call(self, receiver: Any, name: str, args: list) -> Any:
        if receiver is None:
            raise JavaThrow("NullPointerException", f"calling {name}() on null")
        if isinstance(receiver, str):
            return self._string_call(receiver, name, args)
        if isinstance(receiver, list):
            return self._list_call(receiver, name, args)
        if isinstance(receiver, dict):
            return self._map_call(receiver, name, args)
        if isinstance(receiver, set):
            return self._set_call(receiver, name, args)
        if isinstance(receiver, JavaExceptionValue):
            if name == "getMessage":
                return receiver.message
            if name == "toString":
                return java_str(receiver)
        if isinstance(receiver, (int, float)) and not isinstance(receiver, bool):
            if name == "intValue":
                return int(receiver)
            if name == "equals":
                return self._java_equals(receiver, args[0])
            if name == "toString":
                return java_str(receiver)
            if name == "compareTo":
                return (receiver > args[0]) - (receiver < args[0])
        if isinstance(receiver, bool) and name == "equals":
            return self._java_equals(receiver, args[0])
        raise InterpreterError(f"method '{name}' not supported on {java_str(receiver)}")

    def _string_call(self, s: str, name: str, args: list) -> Any:
        table = {
            "length": lambda: len(s),
            "isEmpty": lambda: len(s) == 0,
            "equals": lambda o: isinstance(o, str) and s == o,
            "equalsIgnoreCase": lambda o: isinstance(o, str) and s.lower() == o.lower(),
            "charAt": lambda i: self._char_at(s, i),
            "substring": lambda a, b=None: s[a:b] if b is not None else s[a:],
            "indexOf": lambda o: s.find(java_str(o)),
            "contains": lambda o: java_str(o) in s,
            "startsWith": lambda o: s.startswith(o),
            "endsWith": lambda o: s.endswith(o),
            "trim": lambda: s.strip(),
            "strip": lambda: s.strip(),
            "toUpperCase": lambda: s.upper(),
            "toLowerCase": lambda: s.lower(),
            "concat": lambda o: s + o,
            "replace": lambda a, b: s.replace(java_str(a), java_str(b)),
            "split": lambda sep: s.split(sep),
            "toString": lambda: s,
            "compareTo": lambda o: (s > o) - (s < o),
            "hashCode": lambda: self._java_string_hash(s),
        }
        if name not in table:
            raise InterpreterError(f"String.{name} not supported")
        return table[name](*args)

    @staticmethod
    def _char_at(s: str, i: int) -> str:
        if i < 0 or i >= len(s):
            raise JavaThrow("IndexOutOfBoundsException", f"index {i}")
        return s[i]

    @staticmethod
    def _java_string_hash(s: str) -> int:
        h = 0
        for ch in s:
            h = (31 * h + ord(ch)) & 0xFFFFFFFF
        if h >= 2**31:
            h -= 2**32
        return h

    def _list_call(self, xs: list, name: str, args: list) -> Any:
        if name == "size":
            return len(xs)
        if name == "isEmpty":
            return len(xs) == 0
        if name == "get":
            self._check_index(xs, args[0])
            return xs[args[0]]
        if name == "add":
            if len(args) == 2:
                xs.insert(args[0], args[1])
                return None
            xs.append(args[0])
            return True
        if name == "set":
            self._check_index(xs, args[0])
            old = xs[args[0]]
            xs[args[0]] = args[1]
            return old
        if name == "contains":
            return any(self._java_equals(x, args[0]) for x in xs)
        if name == "indexOf":
            for i, x in enumerate(xs):
                if self._java_equals(x, args[0]):
                    return i
            return -1
        if name == "remove":
            if isinstance(args[0], int) and not isinstance(args[0], bool):
                self._check_index(xs, args[0])
                return xs.pop(args[0])
            try:
                xs.remove(args[0])
                return True
            except ValueError:
                return False
        if name == "clear":
            xs.clear()
            return None
        if name == "toString":
            return java_str(xs)
        raise InterpreterError(f"List.{name} not supported")

    def _map_call(self, m: dict, name: str, args: list) -> Any:
        if name == "get":
            return m.get(args[0])
        if name == "getOrDefault":
            return m.get(args[0], args[1])
        if name == "put":
            old = m.get(args[0])
            m[args[0]] = args[1]
            return old
        if name == "containsKey":
            return args[0] in m
        if name == "containsValue":
            return any(self._java_equals(v, args[0]) for v in m.values())
        if name == "size":
            return len(m)
        if name == "isEmpty":
            return len(m) == 0
        if name == "remove":
            return m.pop(args[0], None)
        if name == "keySet":
            return set(m.keys())
        if name == "values":
            return list(m.values())
        if name == "toString":
            return java_str(m)
        raise InterpreterError(f"Map.{name} not supported")

    def _set_call(self, s: set, name: str, args: list) -> Any:
        if name == "add":
            added = args[0] not in s
            s.add(args[0])
            return added
        if name == "contains":
            return args[0] in s
        if name == "remove":
            present = args[0] in s
            s.discard(args[0])
            return present
        if name == "size":
            return len(s)
        if name == "isEmpty":
            return len(s) == 0
        if name == "toString":
            return java_str(s)
        raise InterpreterError(f"Set.{name} not supported")


# ---------------------------------------------------------------------------
# test harness


@dataclass(frozen=True)
class TestResult:
    class_name: str
    name: str
    status: str  # passed | failed | errored
    message: str = ""


def discover_tests(program: LoadedProgram) -> list[tuple[str, str]]:
    found: list[tuple[str, str]] = []
    for class_name in program.order:
        cls = program.classes[class_name]
        for method_name, unit in sorted(cls.methods.items()):
            if not method_name.startswith("test"):
                continue
            if unit.tree.attrs["params"]:
                continue
            if unit.tree.attrs["return_type"] != "boolean":
                continue
            found.append((class_name, method_name))
    return found


def run_tests(program: LoadedProgram, *, step_limit: int = 2_000_000) -> list[TestResult]:
    results: list[TestResult] = []
    for class_name, method_name in discover_tests(program):
        interp = Interpreter(program, step_limit=step_limit)
        try:
            value = interp.call(class_name, method_name)
        except JavaThrow as thrown:
            results.append(
                TestResult(class_name, method_name, "errored", f"{thrown.type_name}: {thrown.message}")
            )
            continue
        except InterpreterError as exc:
            results.append(TestResult(class_name, method_name, "errored", str(exc)))
            continue
        if value is True:
            results.append(TestResult(class_name, method_name, "passed"))
        else:
            results.append(
                TestResult(class_name, method_name, "failed", f"returned {java_str(value)}")
            )
    return results


def write_junit_xml(results: list[TestResult], path: Path) -> None:
    failures = sum(1 for r in results if r.status == "failed")
    errors = sum(1 for r in results if r.status == "errored")
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<testsuite name="simplikit-fixture" tests="{len(results)}" '
        f'failures="{failures}" errors="{errors}" skipped="0">',
    ]
    for r in results:
        case = f'  <testcase classname={quoteattr(r.class_name)} name={quoteattr(r.name)}'
        if r.status == "passed":
            lines.append(case + "/>")
        elif r.status == "failed":
            lines.append(case + ">")
            lines.append(f"    <failure message={quoteattr(r.message)}>{escape(r.message)}</failure>")
            lines.append("  </testcase>")
        else:
            lines.append(case + ">")
            lines.append(f"    <error message={quoteattr(r.message)}>{escape(r.message)}</error>")
            lines.append("  </testcase>")
    lines.append("</testsuite>")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="simplikit.interp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_build = sub.add_parser("build", help="parse-check every .java file")
    p_build.add_argument("src", type=Path)
    p_test = sub.add_parser("test", help="run test* methods")
    p_test.add_argument("src", type=Path)
    p_test.add_argument("--report", type=Path, default=None)
    p_test.add_argument("--step-limit", type=int, default=2_000_000)
    args = parser.parse_args(argv)

    program, errors = load_program(args.src)
    if errors:
        for message in errors:
            print(f"error: {message}", file=sys.stderr)
        return 1
    if args.command == "build":
        print(f"build ok: {len(program.classes)} classes")
        return 0

    results = run_tests(program, step_limit=args.step_limit)
    if args.report is not None:
        write_junit_xml(results, args.report)
    passed = sum(1 for r in results if r.status == "passed")
    failed = sum(1 for r in results if r.status == "failed")
    errored = sum(1 for r in results if r.status == "errored")
    for r in results:
        marker = {"passed": "ok", "failed": "FAIL", "errored": "ERROR"}[r.status]
        suffix = f" ({r.message})" if r.message else ""
        print(f"{marker:5s} {r.class_name}.{r.name}{suffix}")
    print(f"tests run: {len(results)}, passed: {passed}, failed: {failed}, errors: {errored}")
    return 0 if failed == 0 and errored == 0 else 1


if __name__ == "__main__":
    raise SystemExit(main())
