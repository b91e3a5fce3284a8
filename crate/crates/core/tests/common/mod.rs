/// Counts reflexive, antisymmetric, transitive relation tables on `n` points
/// by trying every subset of off-diagonal pairs.
pub fn brute_force_poset_count(n: usize) -> usize {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut count = 0;
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut rel = vec![false; n * n];
        for i in 0..n {
            rel[i * n + i] = true;
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                rel[i * n + j] = true;
            }
        }
        let antisymmetric = pairs.iter().all(|&(i, j)| !(rel[i * n + j] && rel[j * n + i]));
        let transitive = (0..n).all(|i| {
            (0..n).all(|j| !rel[i * n + j] || (0..n).all(|k| !rel[j * n + k] || rel[i * n + k]))
        });
        if antisymmetric && transitive {
            count += 1;
        }
    }
    count
}
