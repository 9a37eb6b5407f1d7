#pragma once

#include "convlab/bose.hpp"
#include "convlab/constructor.hpp"
#include "convlab/disk.hpp"
#include "convlab/errors.hpp"
#include "convlab/field.hpp"
#include "convlab/field_io.hpp"
#include "convlab/json.hpp"
#include "convlab/parallel.hpp"
#include "convlab/qpoly.hpp"
#include "convlab/series.hpp"
#include "convlab/tolerances.hpp"
#include "convlab/witness.hpp"
