/**
 * Render a double exactly the way CPython's repr does, so numeric output
 * is byte-compatible with the dataset writer.
 *
 * Both runtimes compute the same shortest round-trip digit string; the
 * differences are pure formatting: CPython uses fixed notation for
 * decimal exponents in (-5, 16), always writes ".0" for integral fixed
 * values, and pads the scientific exponent to two digits ("1e-05").
 */

export function pyFloatRepr(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`cannot encode non-finite value ${x}`);
  }
  if (x === 0) {
    return Object.is(x, -0) ? "-0.0" : "0.0";
  }
  const sign = x < 0 ? "-" : "";
  const abs = Math.abs(x);
  // shortest unique digits via toExponential(): "d.dddde±k"
  const sci = abs.toExponential();
  const [mantissa, expPart] = sci.split("e");
  const digits = mantissa.replace(".", "");
  const exp = parseInt(expPart, 10); // value = 0.digits * 10^(exp+1)

  if (exp >= -4 && exp <= 15) {
    // fixed notation
    if (exp >= digits.length - 1) {
      return sign + digits + "0".repeat(exp - digits.length + 1) + ".0";
    }
    if (exp >= 0) {
      return sign + digits.slice(0, exp + 1) + "." + digits.slice(exp + 1);
    }
    return sign + "0." + "0".repeat(-exp - 1) + digits;
  }
  // scientific notation, exponent padded to at least two digits
  const mant = digits.length > 1 ? digits[0] + "." + digits.slice(1) : digits;
  const expSign = exp < 0 ? "-" : "+";
  const expDigits = String(Math.abs(exp)).padStart(2, "0");
  return sign + mant + "e" + expSign + expDigits;
}
