use jspec::decomposition::*;
use jspec::matrix::CMat;
use jspec::pencil::make_tuple;
use jspec::scalar::Exact;

fn em(rows: &[&[i64]]) -> CMat<Exact> {
    CMat::from_rows(rows.iter().map(|r| r.iter().map(|&v| Exact::from_ints(v,0)).collect()).collect()).unwrap()
}

fn main() {
    let a1 = em(&[&[1,0,0],&[0,5,0],&[0,0,0]]);
    let mut a2 = em(&[&[1,2,1],&[2,7,1],&[1,1,0]]);
    a2[(2,2)] = Exact::from_ratio(1,2);
    let t = make_tuple(vec![a1,a2]).unwrap();
    for seed in 0..4u64 {
        match decompose(&t, seed, 24) {
            Ok(d) => {
                println!("seed {}: shape {:?}", seed, d.shape());
                for l in &d.loop_log { println!("  {}", l); }
            }
            Err(e) => println!("seed {}: error {}", seed, e),
        }
    }
}
