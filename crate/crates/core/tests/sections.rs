//! Section calculus on the projective line with the twisting sheaf O(1).

use stdvb::random::monomial_section;
use stdvb::{ProjSite, RingDesc, RingElem};

fn line() -> ProjSite {
    ProjSite::new(1, &RingDesc::rationals()).unwrap()
}

#[test]
fn global_section_equals_its_refinement() {
    let ps = line();
    let s = ps.site();
    let o1 = ps.twisted_bundle(1).unwrap();
    let p = o1.presheaf();
    let x0 = monomial_section(&ps, p, &[1, 0]).unwrap();
    // chart values: 1 on U0, x0/x1 on U1
    assert!(x0.sections[0][0].is_one());
    assert_eq!(x0.sections[1][0].to_string(), "x0/x1");

    let u01 = ps.chart(0, &[0, 1]).unwrap();
    let via = s.compose(x0.cover[0], s.arrows_between(u01, ps.chart(0, &[0]).unwrap()).next().unwrap()).unwrap();
    let mid = p.restrict(s.arrows_between(u01, ps.chart(0, &[0]).unwrap()).next().unwrap(), &x0.sections[0]).unwrap();
    let refined = p
        .section(
            ps.terminal(),
            vec![x0.cover[0], via, x0.cover[1]],
            vec![x0.sections[0].clone(), mid, x0.sections[1].clone()],
        )
        .unwrap();
    assert!(p.sections_equal(&x0, &refined).unwrap());
    assert!(p.sections_equal(&refined, &x0).unwrap());

    let x1 = monomial_section(&ps, p, &[0, 1]).unwrap();
    assert!(!p.sections_equal(&x0, &x1).unwrap());
}

#[test]
fn pullback_to_a_chart() {
    let ps = line();
    let s = ps.site();
    let o1 = ps.twisted_bundle(1).unwrap();
    let p = o1.presheaf();
    let x0 = monomial_section(&ps, p, &[1, 0]).unwrap();
    let u1 = ps.chart(0, &[1]).unwrap();
    let to_p = s.arrows_between(u1, ps.terminal()).next().unwrap();
    let on_u1 = p.section_pullback(&x0, to_p).unwrap();
    assert_eq!(p.unit_inverse(&on_u1).unwrap()[0].to_string(), "x0/x1");
    let same = p.section_pullback(&x0, s.identity(ps.terminal())).unwrap();
    assert!(p.sections_equal(&same, &x0).unwrap());
}

#[test]
fn x0_vanishes_at_infinity() {
    let ps = ProjSite::with_infinity(&RingDesc::rationals()).unwrap();
    let s = ps.site();
    let o1 = ps.twisted_bundle(1).unwrap();
    let p = o1.presheaf();
    let x0 = monomial_section(&ps, p, &[1, 0]).unwrap();
    let x1 = monomial_section(&ps, p, &[0, 1]).unwrap();
    let inf = s.arrow_by_name("Xinf->P").unwrap();
    let at_inf = p.unit_inverse(&p.section_pullback(&x0, inf).unwrap()).unwrap();
    assert!(at_inf[0].is_zero());
    let at_inf = p.unit_inverse(&p.section_pullback(&x1, inf).unwrap()).unwrap();
    assert!(at_inf[0].is_one());
}

#[test]
fn overlap_section_glues_iff_it_has_no_pole() {
    let ps = line();
    let s = ps.site();
    let o1 = ps.twisted_bundle(1).unwrap();
    let p = o1.presheaf();
    let u0 = ps.chart(0, &[0]).unwrap();
    let u01 = ps.chart(0, &[0, 1]).unwrap();
    let g = s.arrows_between(u01, u0).next().unwrap();
    let ring = s.ring(u01);
    let r0 = s.ring(u0);
    // along U01 → U0 a vector v becomes (x0/x1)·v(x1/x0 ↦ (x0/x1)^-1)
    for (given, want) in
        [("x0/x1", Some("1")), ("1", Some("x1/x0")), ("x0/x1^3 - 2", None), ("2*x0/x1 + 5", Some("2 + 5*x1/x0"))]
    {
        let a = p.section(u0, vec![g], vec![vec![RingElem::parse(ring, given).unwrap()]]).unwrap();
        match want {
            Some(w) => assert_eq!(p.unit_inverse(&a).unwrap(), vec![RingElem::parse(r0, w).unwrap()], "{given}"),
            None => assert!(p.unit_inverse(&a).is_err(), "{given} should not glue"),
        }
    }
}

#[test]
fn rank_zero_has_one_section() {
    let ps = line();
    let z = ps.trivial_bundle(0).unwrap();
    let p = z.presheaf();
    let a = p.section(ps.terminal(), ps.chart_cover(0), vec![vec![], vec![]]).unwrap();
    // P itself is outside the chart sieve
    assert!(p.unit_inverse(&a).is_err());
    let b = p.section(ps.terminal(), vec![ps.chart_cover(0)[1]], vec![vec![]]).unwrap();
    assert!(p.sections_equal(&a, &b).unwrap());
}
