#pragma once

#include "value.hpp"
#include "model.hpp"
#include "lexer.hpp"
#include "parser.hpp"
#include "semantics.hpp"
#include "explorer.hpp"
#include "liveness.hpp"
#include "report.hpp"
