"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the domain an operation is defined on."""


class ScenarioError(Exception):
    """A scenario document failed to parse or validate.

    Carries enough context to print ``file:line: where: why`` diagnostics.
    ``path`` is the key path into the document, e.g. ("nodes", 0, "channel").
    """

    def __init__(self, message, *, path=(), line=None, source=None):
        super().__init__(message)
        self.message = message
        self.path = tuple(path)
        self.line = line
        self.source = source

    def dotted_path(self):
        return ".".join(str(p) for p in self.path)

    def __str__(self):
        where = ""
        if self.source is not None:
            where += str(self.source)
            if self.line is not None:
                where += f":{self.line}"
            where += ": "
        elif self.line is not None:
            where += f"line {self.line}: "
        if self.path:
            where += f"{self.dotted_path()}: "
        return where + self.message
