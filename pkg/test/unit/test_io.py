import json

import jax
import jax.numpy as jnp
import numpy as np
import pytest

from hnse.frequency import HorizontalField, SpectralField, make_grid, random_horizontal_field, random_spectral_field
from hnse.io import field_from_bytes, field_to_bytes, load_field, load_field_json, save_field, save_field_json

jax.config.update("jax_enable_x64", True)


class TestBinary:
    grid = make_grid(1, 3, "uniform_periodic", n_s=6)

    def test_layout(self):
        f = random_spectral_field(jax.random.PRNGKey(0), self.grid)
        data = field_to_bytes(f)
        assert data[:4] == b"HNSE"
        # version, d, M, n_lambda as little-endian u32, then the mode byte
        assert np.frombuffer(data[4:20], dtype="<u4").tolist() == [1, 1, 3, 6]
        assert data[20] == 1
        assert len(data) == 21 + 8 * 6 + 16 * 16 * 6
        nodes = np.frombuffer(data[21 : 21 + 48], dtype="<f8")
        assert np.allclose(nodes, np.asarray(self.grid.lambda_nodes))

    def test_restores_field_type(self, tmp_path):
        u = random_horizontal_field(jax.random.PRNGKey(1), self.grid)
        path = str(tmp_path / "state.hnse")
        save_field(u, path)
        restored = load_field(path)
        assert isinstance(restored, HorizontalField)
        assert restored.grid.is_compatible(self.grid)
        assert jnp.array_equal(restored.coeffs, u.coeffs)
        assert isinstance(field_from_bytes(field_to_bytes(u.component(0))), SpectralField)

    def test_geometric_grid(self):
        grid = make_grid(2, 1, "geometric", lambda0=0.5, ratio=2.0, count=3)
        f = random_spectral_field(jax.random.PRNGKey(2), grid, margin=0)
        restored = field_from_bytes(field_to_bytes(f))
        assert restored.grid.grid_mode == "geometric"
        assert restored.grid.is_compatible(grid)
        assert np.allclose(np.asarray(restored.grid.lambda_weights), np.asarray(grid.lambda_weights), rtol=1e-12)

    def test_rejects_corrupt_data(self):
        data = field_to_bytes(random_spectral_field(jax.random.PRNGKey(3), self.grid))
        with pytest.raises(ValueError):
            field_from_bytes(b"XXXX" + data[4:])
        with pytest.raises(ValueError):
            field_from_bytes(data[:4] + np.array([2], dtype="<u4").tobytes() + data[8:])
        with pytest.raises(ValueError):
            field_from_bytes(data[:20] + bytes([7]) + data[21:])
        with pytest.raises(ValueError):
            field_from_bytes(data[:-8])
        # three components fit neither a scalar nor a d = 1 horizontal field
        with pytest.raises(ValueError):
            field_from_bytes(data + data[69:] + data[69:])


class TestJson:
    def test_document(self, tmp_path):
        grid = make_grid(1, 2, "uniform_periodic", n_s=4)
        u = random_horizontal_field(jax.random.PRNGKey(4), grid, margin=0)
        path = str(tmp_path / "state.json")
        save_field_json(u, path)
        with open(path) as f:
            document = json.load(f)
        assert document["format"] == "HNSE-json"
        assert document["components"] == 2
        assert np.array(document["re"]).shape == (2, 3, 3, 4)
        restored = load_field_json(path)
        assert isinstance(restored, HorizontalField)
        assert jnp.array_equal(restored.coeffs, u.coeffs)
