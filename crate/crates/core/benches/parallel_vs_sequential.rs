use algco::ce::{build_ce_complex, cohomology_with};
use algco::cylinder::CylinderComplex;
use algco::homological::{cech_ce_double_with, SimplicialComplex};
use algco::liealg::{direct_product, tensor_rep_product};
use algco::par::Exec;
use algco::{LieAlgebra, Representation};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn ce_cohomology(c: &mut Criterion) {
    // sl2 x heisenberg3 with the tensor of the adjoints: 6-dimensional, fiber 9
    let (a, b) = (LieAlgebra::sl2(), LieAlgebra::heisenberg3());
    let r = tensor_rep_product(&Representation::adjoint(&a), &Representation::adjoint(&b));
    let g = direct_product(&a, &b);
    let ce = build_ce_complex(&g, &r).unwrap();
    let mut group = c.benchmark_group("ce_cohomology");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |bch| bch.iter(|| cohomology_with(&ce, exec)));
    }
    group.finish();
}

fn cylinder_batch(c: &mut Criterion) {
    let g = LieAlgebra::sl2();
    let cyl = CylinderComplex::new(&g, &Representation::adjoint(&g)).unwrap();
    let forms = cyl.random_forms(1, 256, 4);
    let mut group = c.benchmark_group("cylinder_verify_batch");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |bch| bch.iter(|| cyl.verify_batch(&forms, exec)));
    }
    group.finish();
}

fn cech_gluing(c: &mut Criterion) {
    let g = LieAlgebra::heisenberg3();
    let r = Representation::adjoint(&g);
    let nerve = SimplicialComplex::sphere();
    let mut group = c.benchmark_group("cech_ce_double");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |bch| {
            bch.iter(|| cech_ce_double_with(&nerve, &g, &r, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ce_cohomology, cylinder_batch, cech_gluing);
criterion_main!(benches);
