import pytest

import wfcodec as wf

RATE = 4.54e9


@pytest.fixture(scope="session")
def corpus():
    return wf.build_corpus(16, seed=11, sample_rate_hz=RATE)


@pytest.fixture(scope="session")
def int16_cfg():
    return wf.CodecConfig(wf.TransformVariant(wf.TransformKind.INT_DCT_W, 16))


@pytest.fixture(scope="session")
def int8_cfg():
    return wf.CodecConfig(wf.TransformVariant(wf.TransformKind.INT_DCT_W, 8))


@pytest.fixture(scope="session")
def compressed_corpus(corpus, int16_cfg):
    """Fidelity-tuned compression of the default corpus at 1e-5 target."""
    out = []
    for w in corpus:
        c = wf.fidelity_aware_compress(w, 1e-5, int16_cfg)
        assert c is not None, f"no solution for {w.label}"
        out.append(c)
    return out
