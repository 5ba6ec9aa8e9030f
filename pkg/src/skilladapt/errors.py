"""Exception hierarchy shared across the engine."""


class SkillError(Exception):
    """Base class for all engine-level errors."""


# --- demonstration / model fitting ---

class EmptyData(SkillError):
    pass


class SingularComponent(SkillError):
    pass


class DegenerateTimeMarginal(SkillError):
    pass


class SolveFailure(SkillError):
    pass


# --- via-points / trajectory ---

class InvalidTime(SkillError):
    pass


class NonUnitQuaternion(SkillError):
    pass


class UnknownId(SkillError):
    pass


class InvalidRange(SkillError):
    pass


class RadiusOutOfBounds(SkillError):
    pass


# --- intention detection ---

class NonPositiveDt(SkillError):
    pass


class NoTriggeredAxis(SkillError):
    pass


# --- tool gateway ---

class UnknownTool(SkillError):
    pass


class MissingParam(SkillError):
    pass


class OutOfBounds(SkillError):
    def __init__(self, param, value, bounds):
        super().__init__(f"{param}={value!r} outside bounds {bounds}")
        self.param = param
        self.value = value
        self.bounds = bounds


class BackendUnreachable(SkillError):
    pass


class MalformedBackendResponse(SkillError):
    pass


# --- ergodic controller ---

class NotRunning(SkillError):
    pass


class InvalidTransition(SkillError):
    pass


# --- simulator ---

class TooFewSamples(SkillError):
    pass


class TooManyFixtures(SkillError):
    pass


class Busy(SkillError):
    pass


class Aborted(SkillError):
    pass


# --- bridge ---

class UnknownService(SkillError):
    pass


class BadPayload(SkillError):
    pass


class UnknownTopic(SkillError):
    pass


class NotSupported(SkillError):
    pass


class BindFailure(SkillError):
    pass
