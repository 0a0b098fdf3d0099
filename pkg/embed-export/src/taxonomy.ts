/**
 * The six predefined tags, code-embedded exactly as in the core (the registry
 * file only carries open tags). Needed to derive label-text archive keys for
 * both label text modes.
 */

export interface PredefinedTag {
  id: string;
  displayName: string;
  definition: string;
}

export const PREDEFINED_TAGS: PredefinedTag[] = [
  {
    id: 'fixed:career-business',
    displayName: 'Career & Business',
    definition:
      'Encompasses market analysis, corporate strategy, financial management, human resources, ' +
      'product development, marketing strategies, supply chain management, customer relations, ' +
      'entrepreneurship, and international business.',
  },
  {
    id: 'fixed:life-moments',
    displayName: 'Life Moments',
    definition:
      'Captures moments from personal life, including family activities, travel experiences, ' +
      'culinary exploration, holiday celebrations, and personal achievements, reflecting the ' +
      'richness and diversity of daily living.',
  },
  {
    id: 'fixed:creative-design',
    displayName: 'Creative Design',
    definition:
      'Focuses on creative thinking, design theory, art appreciation, case studies in design, ' +
      'and analysis of popular trends, aimed at sparking creativity and providing design inspiration.',
  },
  {
    id: 'fixed:learning-growth',
    displayName: 'Learning & Growth',
    definition:
      'Includes educational news, learning resources, skill training, personal development ' +
      'strategies, career planning, and self-improvement, designed to support lifelong learning ' +
      'and personal growth.',
  },
  {
    id: 'fixed:sports-health',
    displayName: 'Sports & Health',
    definition:
      'Covers healthy eating, fitness, mental health, disease prevention, wellness habits, and ' +
      'medical information, aimed at promoting a healthy lifestyle and improving quality of life.',
  },
  {
    id: 'fixed:tech-frontiers',
    displayName: 'Tech Frontiers',
    definition:
      'Content related to the latest technological inventions, innovations, scientific research ' +
      'progress, future trend forecasts, and practical applications, especially breakthrough ' +
      'technologies that may have a significant impact on industries or society.',
  },
];

/** Label text variants the core may request, depending on its configured mode. */
export function labelTexts(displayName: string, definition: string | null): string[] {
  const texts = [displayName];
  if (definition) texts.push(`${displayName}: ${definition}`);
  return texts;
}
