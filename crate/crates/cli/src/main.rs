fn main() {
    println!("rsw");
}
