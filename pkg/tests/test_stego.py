import numpy as np
import pytest

from wavestego.carriers import CARRIERS, get_carrier
from wavestego.imagecore import PcmAudio, RasterImage, gray_to_rgb
from wavestego.metrics import ber, psnr, ssim
from wavestego.payload import PayloadKind, StegoKey, derive_slot_keys, text_to_canvas
from wavestego.samples import SAMPLE_TEXT, synthetic_audio, synthetic_logo
from wavestego.stego import (
    SPREADING,
    CapacityError,
    Mode,
    SidecarError,
    StegoSidecar,
    embed,
    extract,
    from_watermark,
    fuse_copies,
    make_payloads,
    plan_embedding,
    quantize,
    to_watermark,
)
from wavestego.transforms import dwt2_forward, to_blocks


def all_copies_exact(ex, payloads):
    return all(ex.copies[(l, b)] == payloads[k].canvas for l, b, k in SPREADING)


class TestSpreading:
    def test_table(self):
        assert [(l, b, k.value) for l, b, k in SPREADING] == [
            ("R", "LL", "text"),
            ("R", "HH", "image"),
            ("G", "LL", "image"),
            ("G", "HH", "audio"),
            ("B", "LL", "audio"),
            ("B", "HH", "text"),
        ]

    def test_each_logo_once_per_band(self):
        for kind in PayloadKind:
            bands = sorted(b for _, b, k in SPREADING if k is kind)
            assert bands == ["HH", "LL"]


class TestWatermarkMapping:
    def test_inverse(self):
        p = np.arange(256, dtype=np.uint8)
        w = to_watermark(p)
        assert w.min() == -1 and w.max() < 1
        assert np.array_equal(from_watermark(w), p)

    def test_tolerates_small_error(self):
        p = np.arange(256, dtype=np.uint8)
        assert np.array_equal(from_watermark(to_watermark(p) + 0.49 / 128), p)
        assert np.array_equal(from_watermark(to_watermark(p) - 0.49 / 128), p)

    def test_quantize_half_away_from_zero(self):
        out = quantize(np.array([-3.0, 0.5, 1.49, 2.5, 254.5, 300.0]))
        assert out.tolist() == [0, 1, 1, 3, 255, 255]


class TestPlan:
    def test_capacity_and_disjointness(self, cover, payloads):
        plan = plan_embedding(cover, payloads)
        for slot in plan.slots:
            ph, pw = slot.padded_shape
            assert len(slot.blocks) * 64 >= ph * pw
            assert not set(slot.blocks) & set(slot.enhanced)
        assert plan.slot("G", "HH").kind is PayloadKind.AUDIO
        with pytest.raises(KeyError):
            plan.slot("G", "LH")

    def test_audio_padded_to_blocks(self, cover, payloads):
        slot = plan_embedding(cover, payloads).slot("B", "LL")
        assert slot.canvas_shape == (127, 127) and slot.padded_shape == (128, 128)
        assert len(slot.blocks) == 256 and slot.enhanced == ()

    def test_blocks_are_most_homogeneous(self, cover, payloads):
        plan = plan_embedding(cover, payloads)
        ll = dwt2_forward(cover.pixels).ll
        var = to_blocks(ll).var(axis=(2, 3))
        chosen = plan.slot("R", "LL").blocks
        worst = max(var[r, c] for r, c in chosen)
        others = [var[r, c] for r in range(16) for c in range(16) if (r, c) not in chosen]
        assert worst <= min(others)

    def test_capacity_error(self):
        small = RasterImage(np.full((32, 32), 100, np.uint8))
        payloads = make_payloads("hi", RasterImage(np.zeros((8, 8), np.uint8)), PcmAudio(8000, np.zeros(9, np.int8)), 32)
        with pytest.raises(CapacityError):
            plan_embedding(small, payloads)

    def test_cover_dims(self, payloads):
        with pytest.raises(ValueError):
            plan_embedding(RasterImage(np.zeros((248, 256), np.uint8)), payloads)

    @pytest.mark.parametrize("kw", [{"alpha": -0.1}, {"gain": 0.9}, {"mode": "sideways"}, {"transform": "haar"}])
    def test_bad_parameters(self, cover, payloads, kw):
        with pytest.raises(ValueError):
            plan_embedding(cover, payloads, **kw)

    def test_needs_six_keys(self, cover, payloads, keys):
        with pytest.raises(ValueError):
            embed(cover, payloads, keys[:5])


class TestEmbedExtract:
    def test_lossless_exact(self, cover, payloads, keys, embedded):
        ex = extract(embedded.planes, cover, embedded.sidecar, keys)
        assert all_copies_exact(ex, payloads)
        assert ex.text == SAMPLE_TEXT
        assert ex.image == synthetic_logo()
        assert ex.audio == synthetic_audio()

    @pytest.mark.parametrize("transform", sorted(CARRIERS))
    def test_lossless_exact_every_carrier(self, cover, payloads, keys, transform):
        r = embed(cover, payloads, keys, transform=transform)
        assert all_copies_exact(extract(r.planes, cover, r.sidecar, keys), payloads)

    def test_quantized_text_survives(self, cover, keys, embedded):
        ex = extract(embedded.stego, cover, embedded.sidecar, keys)
        assert ex.text == SAMPLE_TEXT

    def test_adaptive_exact_where_reliable(self, cover, payloads, keys):
        r = embed(cover, payloads, keys, mode="adaptive")
        ex = extract(r.planes, cover, r.sidecar, keys)
        for layer, band, kind in SPREADING:
            ok = ex.reliable[(layer, band)]
            assert ok.mean() > 0.95
            got = ex.copies[(layer, band)].pixels
            assert np.array_equal(got[ok], payloads[kind].canvas.pixels[ok])

    def test_only_selected_blocks_change(self, cover, payloads, keys, embedded):
        plan = embedded.sidecar.plan
        for li, layer in enumerate("RGB"):
            before = dwt2_forward(cover.pixels)
            after = dwt2_forward(embedded.planes[li])
            assert np.max(np.abs(after.lh - before.lh)) < 1e-9
            assert np.max(np.abs(after.hl - before.hl)) < 1e-9
            for band in ("LL", "HH"):
                slot = plan.slot(layer, band)
                touched = set(slot.blocks) | set(slot.enhanced)
                diff = np.abs(to_blocks(after.band(band) - before.band(band))).max(axis=(2, 3))
                for r in range(16):
                    for c in range(16):
                        if (r, c) not in touched:
                            assert diff[r, c] < 1e-9
                for r, c in slot.enhanced:
                    a = to_blocks(after.band(band))[r, c]
                    b = to_blocks(before.band(band))[r, c]
                    assert a.mean() == pytest.approx(b.mean(), abs=1e-9)
                    assert a.var() == pytest.approx(1.44 * b.var(), rel=1e-6)

    def test_deterministic(self, cover, payloads, keys, embedded):
        again = embed(cover, payloads, keys)
        assert again.stego == embedded.stego
        assert again.sidecar.dumps() == embedded.sidecar.dumps()

    def test_psnr_non_increasing_in_alpha(self, cover, payloads, keys):
        last = np.inf
        for alpha in (0.01, 0.02, 0.05, 0.1, 0.15, 0.2):
            r = embed(cover, payloads, keys, alpha)
            value = min(psnr(cover, layer) for layer in r.stego.layers)
            assert value <= last
            last = value

    def test_distortion_energy_quadratic(self, cover, payloads, keys):
        base = cover.pixels.astype(np.float64)
        energy = []
        for alpha in (0.04, 0.08):
            r = embed(cover, payloads, keys, alpha, gain=1.0)
            energy.append(np.sum((r.planes - base) ** 2))
        assert energy[1] / energy[0] == pytest.approx(4.0, rel=0.02)

    def test_degenerate_parameters(self, cover, payloads, keys):
        r = embed(cover, payloads, keys, alpha=0.0, gain=1.0)
        assert r.stego == gray_to_rgb(cover)
        with pytest.raises(ValueError):
            extract(r.stego, cover, r.sidecar, keys)

    def test_wrong_key_on_text_slot(self, cover, rng):
        errors = []
        for _ in range(100):
            text = bytes(rng.integers(0, 256, 256, dtype=np.uint8)).decode("latin-1")
            payloads = make_payloads(text, synthetic_logo(), synthetic_audio())
            keys = derive_slot_keys(int(rng.integers(0, 2**63)))
            r = embed(cover, payloads, keys)
            bad = list(keys)
            bad[0] = StegoKey("R/LL", int(rng.integers(0, 2**63)))
            ex = extract(r.planes, cover, r.sidecar, bad)
            errors.append(ber(payloads[PayloadKind.TEXT].canvas, ex.copies[("R", "LL")], "text"))
            assert ex.copies[("B", "HH")] == payloads[PayloadKind.TEXT].canvas
        assert np.mean(errors) == pytest.approx(0.5, abs=0.05)

    def test_rejects_mismatched_inputs(self, cover, keys, embedded):
        small = RasterImage(np.zeros((128, 128), np.uint8))
        with pytest.raises(ValueError):
            extract(embedded.stego, small, embedded.sidecar, keys)
        with pytest.raises(ValueError):
            extract(embedded.stego, cover, embedded.sidecar, keys[:3])
        other = embed(small, make_payloads("x", RasterImage(np.zeros((8, 8), np.uint8)), PcmAudio(8000, np.zeros(9, np.int8)), 128), keys)
        with pytest.raises(ValueError):
            extract(embedded.stego, cover, other.sidecar, keys)


class TestFusion:
    def test_identical(self, rng):
        a = RasterImage(rng.integers(0, 256, (8, 8), dtype=np.uint8))
        assert fuse_copies(a, a) == a

    def test_round_half_up(self):
        assert fuse_copies(np.array([[0]]), np.array([[255]])).pixels.tolist() == [[128]]
        assert fuse_copies(np.array([[1]]), np.array([[2]])).pixels.tolist() == [[2]]

    def test_reliability(self):
        a, b = np.array([[10, 10, 10]]), np.array([[20, 20, 20]])
        out = fuse_copies(a, b, np.array([[True, False, False]]), np.array([[False, True, False]]))
        assert out.pixels.tolist() == [[10, 20, 128]]

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            fuse_copies(np.zeros((2, 2)), np.zeros((2, 3)))

    def test_clean_copy_lifts_noisy_one(self, rng):
        logo = synthetic_logo().pixels.astype(int)
        for _ in range(50):
            noisy = np.clip(logo + rng.normal(0, 40, logo.shape), 0, 255).astype(np.uint8)
            fused = fuse_copies(noisy, logo)
            assert ssim(logo, fused.pixels) >= min(ssim(logo, noisy), 1.0)


class TestSidecar:
    def test_round_trip(self, embedded, tmp_path):
        text = embedded.sidecar.dumps()
        assert StegoSidecar.loads(text).dumps() == text
        path = tmp_path / "s.side"
        embedded.sidecar.save(path)
        assert StegoSidecar.load(path) == embedded.sidecar

    def test_layout(self, embedded):
        lines = embedded.sidecar.dumps().splitlines()
        assert lines[:7] == [
            "wavestego-sidecar: 1",
            "transform: dwt",
            "mode: nonadaptive",
            "alpha: 0.1",
            "gain: 1.2",
            "amplitude: 510.0",
            "cover: 256x256",
        ]
        assert lines[13].startswith("slot.R.LL.kind: text")
        assert len(lines) == 13 + 6 * 5
        assert "key" not in embedded.sidecar.dumps().lower()

    def test_adaptive_round_trip(self, cover, payloads, keys):
        r = embed(cover, payloads, keys, 0.05, Mode.ADAPTIVE, 1.0)
        again = StegoSidecar.loads(r.sidecar.dumps())
        assert again.plan.mode is Mode.ADAPTIVE and again.plan.gain == 1.0

    @pytest.mark.parametrize(
        "edit",
        [
            lambda t: t.replace("wavestego-sidecar: 1", "wavestego-sidecar: 2"),
            lambda t: t.replace("transform: dwt", "transform: haar"),
            lambda t: t.replace("mode: nonadaptive", "mode: other"),
            lambda t: t.replace("slot.R.LL.kind: text", "slot.R.LL.kind: image"),
            lambda t: t + "extra.field: 1\n",
            lambda t: t + "alpha: 0.2\n",
            lambda t: t + "no separator here\n",
            lambda t: "\n".join(l for l in t.splitlines() if not l.startswith("gain")),
            lambda t: t.replace("LL,8,", "HH,8,", 1),
            lambda t: t.replace("alpha: 0.1", "alpha: lots"),
        ],
        ids=["version", "transform", "mode", "kind", "unknown", "duplicate", "syntax", "missing", "band", "number"],
    )
    def test_strict_parsing(self, embedded, edit):
        with pytest.raises(SidecarError):
            StegoSidecar.loads(edit(embedded.sidecar.dumps()))

    def test_truncated_block_list(self, embedded):
        text = embedded.sidecar.dumps()
        line = next(l for l in text.splitlines() if l.startswith("slot.R.LL.blocks"))
        with pytest.raises(SidecarError):
            StegoSidecar.loads(text.replace(line, line.rsplit(" ", 1)[0]))

    def test_out_of_grid_block(self, cover, keys, embedded):
        text = embedded.sidecar.dumps()
        line = next(l for l in text.splitlines() if l.startswith("slot.R.LL.blocks"))
        first = line.split()[1]
        side = StegoSidecar.loads(text.replace(first, "LL,99,0", 1))
        with pytest.raises(SidecarError):
            extract(embedded.stego, cover, side, keys)


class TestCarriers:
    @pytest.mark.parametrize("name", sorted(CARRIERS))
    def test_split_merge_identity(self, name, cover):
        carrier = get_carrier(name)
        x = cover.pixels.astype(np.float64)
        bands, state = carrier.split(x)
        assert set(bands) == {"LL", "HH"}
        assert bands["LL"].shape == bands["HH"].shape
        assert np.max(np.abs(carrier.merge(state, bands) - x)) < 1e-9

    def test_unknown(self):
        with pytest.raises(ValueError):
            get_carrier("haar")
