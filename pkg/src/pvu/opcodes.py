import enum


class OpCode(enum.Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    DOT = "dot"

    @classmethod
    def parse(cls, name: str) -> "OpCode":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown op {name!r}; expected one of "
                             + ", ".join(m.value for m in cls)) from None
