pub mod algebra;
pub mod level1;
pub mod modsym;
pub mod supersingular;
pub mod weierstrass;
