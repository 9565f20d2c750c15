"""Exact decimal helpers shared by the generators.

All gold answers are plain decimal strings computed without binary
floating point: addition/subtraction/multiplication use ``decimal.Decimal``
(exact for finite operands), and the one potentially non-terminating
operation (averaging) is rounded half-even with integer arithmetic.
"""

from decimal import Decimal, InvalidOperation, localcontext

from .errors import ParseError


def parse_decimal(text: str) -> Decimal:
    """Parse a plain decimal literal; rejects exponents and specials."""
    cleaned = text.strip()
    try:
        value = Decimal(cleaned)
    except InvalidOperation:
        raise ParseError(f"not a decimal literal: {text!r}") from None
    if not value.is_finite() or "e" in cleaned.lower():
        raise ParseError(f"not a plain decimal literal: {text!r}")
    return value


def canonical(value: Decimal) -> Decimal:
    """Drop trailing fractional zeros and normalize -0 to 0.

    quantize/normalize are precision-limited, so size the context to the
    operand; canonicalization must never round.
    """
    if value == 0:
        return Decimal(0)
    with localcontext() as context:
        context.prec = len(value.as_tuple().digits) + abs(value.as_tuple().exponent) + 2
        if value == value.to_integral_value():
            return value.quantize(Decimal(1))
        return value.normalize()


def render(value: Decimal) -> str:
    """Render without exponent notation; canonical scale, leading '-' if negative."""
    return format(canonical(value), "f")


def scaled_integer_ratio(value: Decimal) -> tuple[int, int]:
    """Return (numerator, denominator) of the exact rational value."""
    sign, digits, exponent = value.as_tuple()
    magnitude = int("".join(map(str, digits)) or "0")
    if sign:
        magnitude = -magnitude
    if exponent >= 0:
        return magnitude * 10**exponent, 1
    return magnitude, 10**-exponent


def round_ratio_half_even(numerator: int, denominator: int, places: int) -> Decimal:
    """Round numerator/denominator to ``places`` fractional digits, ties to even."""
    if denominator < 0:
        numerator, denominator = -numerator, -denominator
    scaled = numerator * 10**places
    quotient, remainder = divmod(scaled, denominator)
    # divmod floors toward -inf, so remainder is already in [0, denominator).
    double = 2 * remainder
    if double > denominator or (double == denominator and quotient % 2 == 1):
        quotient += 1
    with localcontext() as context:
        context.prec = len(str(abs(quotient))) + places + 2  # scaleb must not round
        return canonical(Decimal(quotient).scaleb(-places))
