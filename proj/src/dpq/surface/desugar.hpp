#pragma once

#include "dpq/surface/ast.hpp"

namespace dpq::surface {

/// Rewrites sugar into the core-ready surface fragment:
///   - idiom brackets [| f a .. k |] into join (ap (.. (ap (pure f) a) ..) k)
///   - do-blocks into right-nested bind applications
///   - natural literals into S/Z constructor chains
///   - infix && and || into applications of the prelude's and/or
/// Idempotent: desugaring a desugared tree is the identity.
ExprPtr desugar_expr(const ExprPtr& e);

Decl desugar_decl(const Decl& d);

Module desugar(const Module& m);

}  // namespace dpq::surface
