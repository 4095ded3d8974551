import math
import warnings

import numpy as np
import pytest

from qecft.codes import (
    ClassicalLinearCode,
    CSSError,
    DomainError,
    UnsupportedCodeError,
    bound_report,
    concatenate,
    css_code,
    encoded_css_basis_description,
    five_qubit_code,
    gv_rate,
    hamming_code,
    hamming_rate,
    phase_flip_code,
    bit_flip_code,
    read_pcm,
    repetition_code,
    singleton_check,
    steane_code,
    write_pcm,
)
from qecft.stabilizer import Cap, distance


def test_hamming_classical():
    h = hamming_code()
    assert (h.n, h.k, h.distance()) == (7, 4, 3)


def test_steane_from_css(steane):
    assert (steane.n, steane.k) == (7, 1)
    assert distance(steane, 7) == 3
    assert steane.is_css
    z_type = [g for g in steane.generators if g.x_bits == 0]
    assert len(z_type) == 3


def test_css_generator_roles():
    # Z checks from H1, X checks from H2
    code = css_code(repetition_code(3), ClassicalLinearCode.empty(3))
    assert all(g.x_bits == 0 for g in code.generators)
    code = css_code(ClassicalLinearCode.empty(3), repetition_code(3))
    assert all(g.z_bits == 0 for g in code.generators)


def test_css_orthogonality_error():
    with pytest.raises(CSSError) as info:
        css_code(repetition_code(3), repetition_code(3))
    assert info.value.pair is not None


def test_css_drops_dependent_rows_with_warning():
    h = np.vstack([hamming_code().h, (hamming_code().h[0] ^ hamming_code().h[1])[None]])
    with pytest.warns(UserWarning, match="dependent"):
        code = css_code(ClassicalLinearCode(h), hamming_code())
    assert code.k == 1


def test_css_length_mismatch():
    with pytest.raises(CSSError):
        css_code(repetition_code(3), repetition_code(4))


def test_encoded_basis_is_even_hamming_codewords(steane):
    basis = encoded_css_basis_description(steane)
    assert len(basis.zero) == len(basis.one) == 8
    assert all(s.count("1") % 2 == 0 for s in basis.zero)
    assert all(s.count("1") % 2 == 1 for s in basis.one)
    with pytest.raises(UnsupportedCodeError):
        encoded_css_basis_description(five_qubit_code())


def test_shor_code_by_concatenation(shor):
    assert (shor.n, shor.k) == (9, 1)
    assert distance(shor, 9) == 3


def test_concatenate_five_with_repetition():
    code = concatenate(five_qubit_code(), bit_flip_code(3))
    assert (code.n, code.k) == (15, 1)
    # inner logical Z costs 1 qubit, X and Y cost 3; the cheapest outer logical
    # of weight 3 uses one X (or Y) and two Z letters: 3 + 1 + 1
    assert distance(code, 4) is Cap.EXCEEDS
    assert distance(code, 5) == 5


def test_concatenate_requires_k1():
    with pytest.raises(UnsupportedCodeError):
        concatenate(css_code(repetition_code(3), ClassicalLinearCode.empty(3)).tensor(phase_flip_code(3)),
                    bit_flip_code(3))


def test_singleton():
    assert singleton_check(5, 2, 3)
    assert not singleton_check(5, 2, 4)
    with pytest.raises(DomainError):
        singleton_check(5, 1, 3)


def test_rates():
    assert gv_rate(0) == 1
    assert math.isclose(hamming_rate(0.1), 1 - 0.1 * math.log2(3) + 0.1 * math.log2(0.1) + 0.9 * math.log2(0.9))
    with pytest.raises(DomainError):
        gv_rate(1.5)


def test_bound_report_text():
    r = bound_report(5, 1, 3)
    assert r.singleton_ok and r.singleton_tight
    assert "Singleton: satisfied with equality" in r.as_text()
    assert not bound_report(5, 1, 4).singleton_ok
    assert bound_report(7, 1, 3).singleton_ok and not bound_report(7, 1, 3).singleton_tight


def test_pcm_round_trip(tmp_path, fixtures):
    h = read_pcm(fixtures["hamming.pcm"])
    assert np.array_equal(h.h, hamming_code().h)
    path = tmp_path / "x.pcm"
    write_pcm(path, h, "hamming")
    assert np.array_equal(read_pcm(path).h, h.h)


@pytest.mark.parametrize("text", ["0 1 2\n", "0 1\n1\n", "# only a comment\n"])
def test_pcm_errors(tmp_path, text):
    path = tmp_path / "bad.pcm"
    path.write_text(text)
    with pytest.raises(ValueError):
        read_pcm(path)


def test_steane_is_hamming_css():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert steane_code().k == 1
