use qbar_core::{Field, QPoly, Tower};

fn q(c: &[i64]) -> QPoly {
    QPoly::from_ints(c)
}

#[test]
fn three_quadratics() {
    let t = Tower::from_schedule(&[q(&[-2, 0, 1]), q(&[-3, 0, 1]), q(&[-5, 0, 1])]).unwrap();
    assert_eq!(t.degrees(), vec![1, 2, 4, 8]);
    t.validate().unwrap();
}

#[test]
fn fourth_root_of_two() {
    let t = Tower::from_schedule(&[q(&[-2, 0, 0, 0, 1])]).unwrap();
    assert_eq!(t.degrees(), vec![1, 8]);
    t.validate().unwrap();
}

#[test]
fn mixed_nonabelian() {
    let t = Tower::from_schedule(&[q(&[-2, 0, 1]), q(&[-2, 0, 0, 0, 1]), q(&[-3, 0, 1])]).unwrap();
    assert_eq!(t.degrees(), vec![1, 2, 8, 16]);
    t.validate().unwrap();
    let f = t.field(3).unwrap();
    let z1 = t.lifted_generator(1, 3).unwrap();
    assert_eq!(f.mul(&z1, &z1), f.integer(2));
}
