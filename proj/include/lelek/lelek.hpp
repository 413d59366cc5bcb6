#pragma once

#include "lelek/conjugacy.hpp"
#include "lelek/core.hpp"
#include "lelek/fraisse.hpp"
#include "lelek/geometry.hpp"
#include "lelek/homeo.hpp"
#include "lelek/io.hpp"
#include "lelek/morphisms.hpp"
#include "lelek/sequence.hpp"
#include "lelek/structures.hpp"
