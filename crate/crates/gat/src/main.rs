fn main() {
    println!("gat: work in progress");
}
