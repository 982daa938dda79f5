# quotatope/domain/exceptions.py

class QuotatopeException(Exception):
    """Base exception for quotatope errors."""
    pass

class InputException(QuotatopeException):
    """Exception for invalid arguments or malformed quota systems."""
    pass

class CapacityException(QuotatopeException):
    """Exception for requests beyond an enumeration, sieve or subset guard."""
    pass

class NumericException(QuotatopeException):
    """Exception for numeric procedures that cannot produce a result."""
    pass

class VerificationException(QuotatopeException):
    """Raised when a verification suite reports a failed check."""
    pass
