use super::surface::Expr;

/// Removes comprehension sugar: `{e | x in e0}` becomes `for (x in e0) {e}`.
pub fn desugar(e: &Expr) -> Expr {
    let d = |e: &Expr| Box::new(desugar(e));
    match e {
        Expr::Comprehension(body, x, e0) => Expr::For(x.clone(), d(e0), Box::new(Expr::Singleton(d(body)))),
        Expr::Var(_) | Expr::Lab(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Empty(_) => e.clone(),
        Expr::Let(x, a, b) => Expr::Let(x.clone(), d(a), d(b)),
        Expr::For(x, a, b) => Expr::For(x.clone(), d(a), d(b)),
        Expr::Sum(x, a, b) => Expr::Sum(x.clone(), d(a), d(b)),
        Expr::Record(fs) => Expr::Record(fs.iter().map(|(n, e)| (n.clone(), desugar(e))).collect()),
        Expr::Field(a, n) => Expr::Field(d(a), n.clone()),
        Expr::Not(a) => Expr::Not(d(a)),
        Expr::Singleton(a) => Expr::Singleton(d(a)),
        Expr::IsEmpty(a) => Expr::IsEmpty(d(a)),
        Expr::And(a, b) => Expr::And(d(a), d(b)),
        Expr::Plus(a, b) => Expr::Plus(d(a), d(b)),
        Expr::Eq(a, b) => Expr::Eq(d(a), d(b)),
        Expr::Union(a, b) => Expr::Union(d(a), d(b)),
        Expr::If(c, t, f) => Expr::If(d(c), d(t), d(f)),
    }
}
