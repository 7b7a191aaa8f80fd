import pytest

from isobuild.core.exceptions import (
    BaseError,
    InputError,
    PrecisionExhausted,
    UnknownSuite,
)


class TestBaseError:
    def test_encode_decode(self):
        err = PrecisionExhausted("divisor is zero to precision 20")
        data = err.encode()
        assert data == {"code": "PrecisionExhausted", "message": "divisor is zero to precision 20"}

        decoded = BaseError.decode(data)
        assert isinstance(decoded, PrecisionExhausted)
        assert str(decoded) == str(err)

    def test_encode_json(self):
        err = UnknownSuite("unknown suite 'xyz'")
        decoded = BaseError.decode_json(err.encode_json())
        assert isinstance(decoded, UnknownSuite)
        assert isinstance(decoded, InputError)

    def test_decode_unknown_code(self):
        with pytest.raises(ValueError):
            BaseError.decode({"code": "NoSuchError", "message": ""})

    def test_decode_invalid_json(self):
        with pytest.raises(ValueError):
            BaseError.decode_json("{not json")
