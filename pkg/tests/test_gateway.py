from __future__ import annotations

import numpy as np
import pytest

from goalforge.errors import (
    MissingSlot,
    ProviderError,
    SafetyBlocked,
    TransientProviderError,
    UnknownSlot,
)
from goalforge.gateway import (
    Gateway,
    MockProvider,
    ProviderConfig,
    RateLimiter,
    TEMPLATE_NAMES,
    load_template,
    render,
)

from .conftest import TEST_DATA


def _expected(name: str) -> str:
    return (TEST_DATA / f"rendered_{name}.txt").read_text(encoding="utf-8")


class TestTemplates:
    def test_all_templates_load_with_expected_slots(self):
        slots = {name: load_template(name).slots for name in TEMPLATE_NAMES}
        assert slots["annotate"] == {"tedtalk_data"}
        assert slots["roundtable"] == {"type", "n", "kg_box", "bg_box"}
        assert slots["kg_extract"] == {"kg_guide", "conversation_script"}
        assert slots["new_goals"] == {"kg_data"}

    def test_annotate_renders_byte_exact(self):
        out = render(load_template("annotate"), {"tedtalk_data": ""})
        assert out == _expected("annotate")

    def test_roundtable_renders_byte_exact_with_reference_slots(self):
        out = render(load_template("roundtable"),
                     {"type": "1", "n": "5", "kg_box": "", "bg_box": ""})
        assert out == _expected("roundtable")
        assert "【SDGs Goal 1】" in out
        assert "totaling 5 participants" in out

    def test_kg_extract_renders_byte_exact(self):
        out = render(load_template("kg_extract"),
                     {"kg_guide": "", "conversation_script": ""})
        assert out == _expected("kg_extract")
        assert "must definitively exist within the nodes" in out

    def test_new_goals_renders_byte_exact(self):
        out = render(load_template("new_goals"), {"kg_data": ""})
        assert out == _expected("new_goals")

    def test_substitution_is_exact(self):
        template = load_template("annotate")
        body = render(template, {"tedtalk_data": "PAYLOAD"})
        assert body == template.body.replace("{tedtalk_data}", "PAYLOAD")
        assert "{tedtalk_data}" not in body

    def test_missing_and_unknown_slots(self):
        template = load_template("roundtable")
        with pytest.raises(MissingSlot):
            render(template, {"type": "1"})
        with pytest.raises(UnknownSlot):
            render(template, {"type": "1", "n": "2", "kg_box": "", "bg_box": "", "oops": ""})


class TestMockProvider:
    def test_generation_deterministic_for_seed(self, mock_gateway):
        gw = mock_gateway(seed=42)
        outputs = {gw.generate("You are a roundtable expert ... totaling 3 participants") for _ in range(5)}
        assert len(outputs) == 1

    def test_different_seeds_differ(self, mock_gateway):
        prompt = "You are a roundtable expert ... totaling 3 participants"
        assert mock_gateway(seed=42).generate(prompt) != mock_gateway(seed=43).generate(prompt)

    def test_output_depends_on_prompt_and_model(self, catalog):
        provider = MockProvider(catalog=catalog)
        c1 = ProviderConfig(seed=1, generation_model="model-a")
        c2 = ProviderConfig(seed=1, generation_model="model-b")
        assert provider.generate("some prompt", c1) != provider.generate("some prompt", c2)
        assert provider.generate("prompt one", c1) != provider.generate("prompt two", c1)

    def test_safety_marker_blocks(self, mock_gateway):
        with pytest.raises(SafetyBlocked):
            mock_gateway().generate("please summarize [[blocked-content]]")


class FlakyProvider:
    """Fails with transient errors N times, then defers to the mock."""

    def __init__(self, failures: int, exc=TransientProviderError):
        self.failures = failures
        self.exc = exc
        self.calls = 0
        self._inner = MockProvider()

    def generate(self, prompt, config):
        self.calls += 1
        if self.calls <= self.failures:
            raise self.exc("injected failure")
        return self._inner.generate(prompt, config)

    def embed(self, texts, config):
        return self._inner.embed(texts, config)


class TestRetries:
    def test_two_failures_then_success_records_retries(self):
        provider = FlakyProvider(failures=2)
        gw = Gateway(provider, ProviderConfig(max_retries=3, backoff_base=0.0), sleep=lambda s: None)
        assert gw.generate("hello")
        assert provider.calls == 3
        assert gw.stats.retries_total == 2
        assert gw.stats.last_attempts == 3

    def test_exhausted_retries_raise(self):
        provider = FlakyProvider(failures=10)
        gw = Gateway(provider, ProviderConfig(max_retries=2, backoff_base=0.0), sleep=lambda s: None)
        with pytest.raises(ProviderError, match="after 2 retries"):
            gw.generate("hello")
        assert provider.calls == 3  # initial call + 2 retries

    def test_safety_block_never_retried(self):
        provider = FlakyProvider(failures=5, exc=SafetyBlocked)
        gw = Gateway(provider, ProviderConfig(max_retries=3, backoff_base=0.0), sleep=lambda s: None)
        with pytest.raises(SafetyBlocked):
            gw.generate("hello")
        assert provider.calls == 1

    def test_backoff_grows_exponentially(self):
        delays = []
        provider = FlakyProvider(failures=3)
        gw = Gateway(provider, ProviderConfig(max_retries=3, backoff_base=0.5), sleep=delays.append)
        gw.generate("hello")
        assert delays == [0.5, 1.0, 2.0]


class TestEmbeddings:
    def test_identical_text_identical_vector(self, mock_gateway):
        gw = mock_gateway(seed=42)
        a = gw.embed(["water"])
        b = gw.embed(["water"])
        assert np.array_equal(a, b)

    def test_shape_and_unit_norm(self, mock_gateway):
        vectors = mock_gateway().embed(["one", "two", "three"])
        assert vectors.shape == (3, 64)
        assert np.allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-9)

    def test_cosine_self_is_one(self, mock_gateway):
        v = mock_gateway().embed(["x"])[0]
        assert abs(float(v @ v) - 1.0) <= 1e-9

    def test_empty_text_rejected(self, mock_gateway):
        with pytest.raises(ValueError):
            mock_gateway().embed(["ok", ""])


def test_rate_limiter_spaces_out_calls():
    clock = {"now": 0.0}
    sleeps = []

    def fake_sleep(s):
        sleeps.append(s)
        clock["now"] += s

    limiter = RateLimiter(rate_per_s=2.0, burst=1, clock=lambda: clock["now"], sleep=fake_sleep)
    limiter.acquire()  # uses the initial token
    limiter.acquire()  # must wait ~0.5s
    assert sleeps and abs(sum(sleeps) - 0.5) < 1e-6
