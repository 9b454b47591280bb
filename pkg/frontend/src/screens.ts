/** Static participant-facing screens: the briefing shown before trial 1
 * and the completion screen. The completion screen shows a finish code and
 * nothing else: participants never see scores or outcomes. */

export const BRIEFING_HTML = `
<h1>Welcome!</h1>
<p>In this experiment, you will act as a teacher helping a student choose
the best path through a graph to maximize points.</p>

<h2>Graph structure</h2>
<ul>
  <li>The graph consists of circles connected by lines.</li>
  <li>Each circle shows a point value.</li>
</ul>

<h2>How the student navigates</h2>
<ul>
  <li>The student starts at the top and moves down or diagonally down to an
  endpoint, gathering points along the way.</li>
  <li>The student does not know all possible paths and takes what they
  believe is the best route given what they know.</li>
</ul>

<h2>Your role</h2>
<ul>
  <li>You see all possible paths; the student's path is highlighted.</li>
  <li>You do not know which paths the student knows, but you can assume they
  took the best path available to them.</li>
  <li>On each trial, click exactly one edge to reveal to the student.</li>
</ul>

<h2>Example of good advice</h2>
<p>A student who knew only part of the graph earned 4 points. Revealing the
edge (5,7) lets them replan and earn 6 points instead of 4.</p>

<h2>Example of bad advice</h2>
<p>For that same student, revealing the edge (5,9) will not increase their
points: nothing about their best route changes.</p>

<p>Some trials add a first step where you mark three edges before teaching;
the trial will say so. There is no feedback about outcomes during the
experiment.</p>
`;

export function completionHtml(finishCode: string): string {
  return `
<h1>All done!</h1>
<p>Thank you for teaching. Your finish code:</p>
<p class="finish-code">${finishCode}</p>
<p>You can close this window now.</p>
`;
}
