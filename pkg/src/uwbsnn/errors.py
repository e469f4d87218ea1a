"""Exception hierarchy. Everything raised on purpose derives from UwbSnnError."""


class UwbSnnError(Exception):
    pass


class ConfigError(UwbSnnError, ValueError):
    pass


class SchemaError(UwbSnnError, KeyError):
    def __str__(self):
        # KeyError.__str__ repr()s the message
        return str(self.args[0]) if self.args else ""


class ParseError(UwbSnnError, ValueError):
    pass


class FormatError(UwbSnnError, ValueError):
    pass


class InsufficientDataError(UwbSnnError, ValueError):
    pass


class FeatureError(UwbSnnError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class EncodingError(UwbSnnError, ValueError):
    pass


class ShapeError(UwbSnnError, ValueError):
    pass


class NumericError(UwbSnnError, ValueError):
    pass


class StateError(UwbSnnError, RuntimeError):
    pass
