use super::ast::SurfaceExpr;
use super::parser::parse;

/// A named surface shipped as DSL text, so that every pipeline exercises
/// the parser. Isothermic built-ins carry the dual surface used by the
/// conformal form builder.
#[derive(Debug, Clone)]
pub struct BuiltinSurface {
    pub name: &'static str,
    pub dsl: &'static str,
    /// Christoffel dual in matching conformal coordinates, where one is
    /// known in closed form.
    pub dual_dsl: Option<&'static str>,
}

const BUILTINS: &[BuiltinSurface] = &[
    BuiltinSurface {
        name: "cylinder",
        dsl: "(cos(u), sin(u), v)",
        dual_dsl: Some("(cos(u), sin(u), -v)"),
    },
    BuiltinSurface {
        name: "cone",
        // exp(a v)(cos u, sin u, 1) with a = 1/√2 is conformally
        // parametrised; its dual is the reflected cone exp(−a v)(…).
        dsl: "(exp(v*0.7071067811865476)*cos(u), exp(v*0.7071067811865476)*sin(u), exp(v*0.7071067811865476))",
        dual_dsl: Some("(exp(-v*0.7071067811865476)*cos(u), exp(-v*0.7071067811865476)*sin(u), exp(-v*0.7071067811865476))"),
    },
    BuiltinSurface {
        name: "sphere",
        // unit sphere in inverse-stereographic coordinates; the dual is the
        // polynomial Christoffel transform integrated from dx* = (x_u du − x_v dv)/E.
        dsl: "(2*u/(1 + u*u + v*v), 2*v/(1 + u*u + v*v), (u*u + v*v - 1)/(1 + u*u + v*v))",
        dual_dsl: Some("(u*(1 + v*v)/2 - u*u*u/6, v*v*v/6 - u*u*v/2 - v/2, (u*u - v*v)/2)"),
    },
    BuiltinSurface {
        name: "quadric",
        dsl: "(1, u, v, u*v)",
        dual_dsl: None,
    },
    BuiltinSurface {
        name: "elliptic_paraboloid",
        dsl: "(1, u, v, u*u + v*v)",
        dual_dsl: None,
    },
    BuiltinSurface {
        name: "torus",
        dsl: "((2 + cos(v))*cos(u), (2 + cos(v))*sin(u), sin(v))",
        dual_dsl: None,
    },
];

pub fn builtin(name: &str) -> Option<&'static BuiltinSurface> {
    BUILTINS.iter().find(|b| b.name == name)
}

pub fn builtin_names() -> Vec<&'static str> {
    BUILTINS.iter().map(|b| b.name).collect()
}

impl BuiltinSurface {
    pub fn expr(&self) -> SurfaceExpr {
        parse(self.dsl).expect("builtin surface must parse")
    }

    pub fn dual_expr(&self) -> Option<SurfaceExpr> {
        self.dual_dsl
            .map(|d| parse(d).expect("builtin dual must parse"))
    }
}
