/**
 * Figure assembly: read labeled run CSVs, extract series, render one panel.
 */

import * as fs from "node:fs";

import {
  CsvError,
  EnergySeries,
  ProfileSeries,
  firstEnergyIncrease,
  parseEnergyCsv,
  parseProfileCsv,
} from "./csv.js";
import { Marker, Series, renderChart } from "./svg.js";

export interface FigureSpec {
  inputs: Array<{ path: string; label: string }>;
  outputPath: string;
  title?: string;
}

function readInput(path: string): string {
  try {
    return fs.readFileSync(path, "utf-8");
  } catch (err) {
    throw new CsvError(path, `cannot read file (${(err as Error).message})`);
  }
}

function checkSpec(spec: FigureSpec): void {
  if (spec.inputs.length === 0) {
    throw new Error("figure needs at least one input series");
  }
}

export function loadProfiles(spec: FigureSpec): Array<{ label: string; data: ProfileSeries }> {
  checkSpec(spec);
  return spec.inputs.map(({ path, label }) => ({
    label,
    data: parseProfileCsv(readInput(path), path),
  }));
}

export function loadEnergies(spec: FigureSpec): Array<{ label: string; data: EnergySeries }> {
  checkSpec(spec);
  return spec.inputs.map(({ path, label }) => ({
    label,
    data: parseEnergyCsv(readInput(path), path),
  }));
}

/** Overlaid density profiles, one curve per labeled run. */
export function plotProfiles(spec: FigureSpec): string {
  const loaded = loadProfiles(spec);
  const series: Series[] = loaded.map(({ label, data }) => ({
    label,
    x: data.x,
    y: data.rho,
  }));
  const svg = renderChart(series, {
    title: spec.title,
    xLabel: "x",
    yLabel: "scalar flux",
  });
  fs.writeFileSync(spec.outputPath, svg);
  return spec.outputPath;
}

/**
 * Energy traces over time; any trace that ever increases beyond round-off
 * gets a marker at its first increasing step.
 */
export function plotEnergy(spec: FigureSpec): string {
  const loaded = loadEnergies(spec);
  const series: Series[] = loaded.map(({ label, data }) => ({
    label,
    x: data.t,
    y: data.e,
  }));
  const markers: Marker[] = [];
  for (const { label, data } of loaded) {
    const idx = firstEnergyIncrease(data.e);
    if (idx !== null) {
      markers.push({
        x: data.t[idx],
        y: data.e[idx],
        label: `${label}: increase at step ${data.step[idx]}`,
      });
    }
  }
  const svg = renderChart(series, {
    title: spec.title,
    xLabel: "t",
    yLabel: "energy",
    markers,
  });
  fs.writeFileSync(spec.outputPath, svg);
  return spec.outputPath;
}
