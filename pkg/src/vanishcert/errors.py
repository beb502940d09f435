"""Exception hierarchy shared by all modules.

Every error carries a machine-readable ``code`` so the CLI can turn it into a
structured record instead of a traceback.
"""


class CertError(Exception):
    code = "CertError"

    def to_record(self) -> dict:
        return {"error": self.code, "message": str(self)}


# lie_core
class UnsupportedFamily(CertError):
    code = "UnsupportedFamily"


class DegenerateParams(CertError):
    code = "DegenerateParams"


class DimensionMismatch(CertError):
    code = "DimensionMismatch"


class InvalidAlgebra(CertError):
    code = "InvalidAlgebra"


class NotInvolution(CertError):
    code = "NotInvolution"


class NotAutomorphism(CertError):
    code = "NotAutomorphism"


class NotCartanInvolution(CertError):
    code = "NotCartanInvolution"


# rep_core
class AlgebraMismatch(CertError):
    code = "AlgebraMismatch"


class NoPositiveSolution(CertError):
    code = "NoPositiveSolution"


class NotCommuting(CertError):
    code = "NotCommuting"


class NotDiagonalizable(CertError):
    code = "NotDiagonalizable"


# bochner
class AntisymmetryViolation(CertError):
    code = "AntisymmetryViolation"


class GramNotPD(CertError):
    code = "GramNotPD"


# roots
class NotAbelian(CertError):
    code = "NotAbelian"


class NotMaximal(CertError):
    code = "NotMaximal"


class NotThetaStable(CertError):
    code = "NotThetaStable"


class RootSpaceDegeneracy(CertError):
    code = "RootSpaceDegeneracy"


class OrderMismatch(CertError):
    code = "OrderMismatch"


# cert_cli
class ConfigError(CertError):
    code = "ConfigError"


class ParseError(ConfigError):
    code = "ParseError"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position

    def to_record(self) -> dict:
        record = super().to_record()
        record["position"] = self.position
        return record
