use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(script: &std::ffi::CStr) {
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(geneo_py::geneo_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("g", module).unwrap();
        if let Err(e) = py.run(script, Some(&globals), None) {
            e.print(py);
            panic!("python check failed");
        }
    });
}

#[test]
fn sym3_uniform_operator() {
    run(c"
s = g.Setting.identity(g.Group.symmetric(3))
b = [[1/3] * 3 for _ in range(3)]
r = s.is_geneo(b)
assert r['is_geneo'] and abs(r['operator_norm'] - 1) < 1e-12
mu = s.represent(b)['mu']
assert s.is_permutant(mu)
m = g.matrix_of(3, 3, mu)
assert max(abs(m[i][j] - b[i][j]) for i in range(3) for j in range(3)) < 1e-9
");
}

#[test]
fn errors_become_value_errors() {
    run(c"
try:
    g.Group.cyclic(0)
except ValueError as e:
    assert 'at least one element' in str(e)
else:
    raise AssertionError('empty group accepted')
try:
    g.decompose([[0.5, 0.0]])
except ValueError:
    pass
else:
    raise AssertionError('non-stochastic matrix accepted')
");
}

#[test]
fn torus_functions() {
    run(c"
assert len(g.unit_vectors(29)) == 28
img = [[1.0 if (r, c) == (0, 0) else 0.0 for c in range(5)] for r in range(5)]
out = g.torus_apply(5, (1, 0), img)
assert out == [0.2, 0.0, 0.0, 0.0, 0.0]
moved = g.toroidal_translate(img, (1, 2))
assert moved[4][3] == 1.0
assert len(g.stack_features(29, g.pad_mnist(bytes(784)))) == 28
");
}
