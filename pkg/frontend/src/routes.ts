/** Console navigation: five pages, every one reachable from Home. */

export const ROUTES = [
  "home",
  "experiment-configuration",
  "logs",
  "progress",
  "result-analysis",
] as const;

export type Route = (typeof ROUTES)[number];

export const NAVIGATION: Record<Route, readonly Route[]> = {
  home: ["experiment-configuration", "logs", "progress", "result-analysis"],
  "experiment-configuration": ["home", "progress"],
  logs: ["home"],
  progress: ["home", "result-analysis"],
  "result-analysis": ["home", "experiment-configuration"],
};
