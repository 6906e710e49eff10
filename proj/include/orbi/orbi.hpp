#pragma once

#include "orbi/rational.hpp"
#include "orbi/expr.hpp"
#include "orbi/parser.hpp"
#include "orbi/matrix.hpp"
#include "orbi/forms.hpp"
#include "orbi/pfaffian.hpp"
#include "orbi/groups.hpp"
#include "orbi/domain.hpp"
#include "orbi/quadrature.hpp"
#include "orbi/atlas.hpp"
#include "orbi/bundle.hpp"
#include "orbi/sectors.hpp"
#include "orbi/chernweil.hpp"
#include "orbi/document.hpp"
#include "orbi/gallery.hpp"
#include "orbi/cli.hpp"
