fn main() {
    println!("focklat CLI placeholder");
}
