#pragma once

#include "chrc/syntax.hpp"
#include "chrc/store.hpp"
#include "chrc/engine.hpp"
#include "chrc/wqo.hpp"
#include "chrc/forest.hpp"
#include "chrc/decide.hpp"
#include "chrc/oracle.hpp"
#include "chrc/corpus.hpp"
#include "chrc/io.hpp"
